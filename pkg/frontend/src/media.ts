// Browser-to-browser media: one RTCPeerConnection per peer, with every
// negotiation blob (SDP, ICE) relayed opaquely through the server's signal
// messages. Uses the perfect-negotiation pattern; the lexicographically
// smaller id is the polite side.

import { RoomConnection } from "./transport.js";

interface SignalBlob {
  kind: "sdp" | "ice";
  description?: RTCSessionDescriptionInit;
  candidate?: RTCIceCandidateInit | null;
}

interface PeerEntry {
  pc: RTCPeerConnection;
  polite: boolean;
  makingOffer: boolean;
}

export class PeerMesh {
  private peers = new Map<string, PeerEntry>();

  constructor(
    private selfId: string,
    private connection: RoomConnection,
    private localStream: MediaStream | null,
    private onTrack: (peerId: string, stream: MediaStream) => void,
  ) {}

  private entry(peerId: string): PeerEntry {
    let entry = this.peers.get(peerId);
    if (entry) return entry;
    const pc = new RTCPeerConnection();
    entry = { pc, polite: this.selfId < peerId, makingOffer: false };
    this.peers.set(peerId, entry);
    if (this.localStream) {
      for (const track of this.localStream.getTracks()) {
        pc.addTrack(track, this.localStream);
      }
    }
    pc.ontrack = (event) => {
      if (event.streams[0]) this.onTrack(peerId, event.streams[0]);
    };
    pc.onicecandidate = (event) => {
      const blob: SignalBlob = { kind: "ice", candidate: event.candidate?.toJSON() ?? null };
      this.connection.signal(peerId, blob);
    };
    pc.onnegotiationneeded = async () => {
      const e = this.peers.get(peerId);
      if (!e) return;
      try {
        e.makingOffer = true;
        await pc.setLocalDescription();
        this.connection.signal(peerId, {
          kind: "sdp",
          description: pc.localDescription?.toJSON(),
        } satisfies SignalBlob);
      } finally {
        e.makingOffer = false;
      }
    };
    return entry;
  }

  /** Start (or restart) negotiation toward a newly seen peer. */
  connectTo(peerId: string): void {
    if (peerId !== this.selfId) this.entry(peerId);
  }

  drop(peerId: string): void {
    this.peers.get(peerId)?.pc.close();
    this.peers.delete(peerId);
  }

  closeAll(): void {
    for (const id of [...this.peers.keys()]) this.drop(id);
  }

  async handleSignal(fromId: string, payload: unknown): Promise<void> {
    if (fromId === this.selfId) return;
    const blob = payload as SignalBlob;
    const entry = this.entry(fromId);
    const { pc } = entry;
    if (blob.kind === "ice") {
      if (blob.candidate) await pc.addIceCandidate(blob.candidate).catch(() => {});
      return;
    }
    if (!blob.description) return;
    const offerCollision =
      blob.description.type === "offer" &&
      (entry.makingOffer || pc.signalingState !== "stable");
    if (offerCollision && !entry.polite) return; // impolite side ignores
    if (offerCollision) {
      await Promise.all([
        pc.setLocalDescription({ type: "rollback" }).catch(() => {}),
        pc.setRemoteDescription(blob.description),
      ]);
    } else {
      await pc.setRemoteDescription(blob.description);
    }
    if (blob.description.type === "offer") {
      await pc.setLocalDescription();
      this.connection.signal(fromId, {
        kind: "sdp",
        description: pc.localDescription?.toJSON(),
      } satisfies SignalBlob);
    }
  }
}
