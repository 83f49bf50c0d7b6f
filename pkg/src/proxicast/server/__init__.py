"""Room service: membership, signaling relay, and serialized layout mutations."""
