// Pure room state, a fold over the ordered broadcast stream: replaying the
// same messages always reproduces the same ViewModel. Audio volumes are the
// broadcast gains verbatim - never recomputed client-side.

import {
  JoinedPayload,
  LayoutSnapshot,
  MemberInfo,
  PeerJoinedPayload,
  PeerLeftPayload,
  SlotInfo,
  WireMessage,
  ErrorPayload,
} from "./protocol.js";

export type ConnectionState = "idle" | "joined" | "closed";

export class ViewModel {
  connection: ConnectionState = "idle";
  selfId: string | null = null;
  members = new Map<string, MemberInfo>();
  slots: SlotInfo[] = [];
  layout: LayoutSnapshot | null = null;
  lastSeq = -1;
  statusMessage = "";

  /** Apply one server message; returns true when it advanced the state. */
  applyMessage(msg: WireMessage): boolean {
    if (msg.type === "error") {
      const payload = msg.payload as ErrorPayload;
      this.statusMessage = `${payload.code}: ${payload.message}`;
      return false;
    }
    if (msg.seq !== undefined && msg.seq <= this.lastSeq) {
      return false; // stale or duplicate broadcast: drop it
    }
    switch (msg.type) {
      case "joined": {
        const payload = msg.payload as JoinedPayload;
        this.selfId = payload.self;
        this.members = new Map(payload.members.map((m) => [m.id, m]));
        this.slots = payload.slots;
        this.layout = payload.layout;
        this.connection = "joined";
        break;
      }
      case "peer-joined": {
        const payload = msg.payload as PeerJoinedPayload;
        this.members.set(payload.participant, {
          id: payload.participant,
          display_name: payload.display_name,
          observer: payload.observer,
        });
        this.layout = payload.layout;
        break;
      }
      case "peer-left": {
        const payload = msg.payload as PeerLeftPayload;
        this.members.delete(payload.participant);
        break;
      }
      case "layout-state": {
        this.layout = msg.payload as LayoutSnapshot;
        break;
      }
      case "volume-update": {
        const payload = msg.payload as Partial<LayoutSnapshot>;
        if (this.layout && payload.gains) {
          this.layout = { ...this.layout, gains: payload.gains };
        }
        break;
      }
      default:
        return false;
    }
    if (msg.seq !== undefined) this.lastSeq = msg.seq;
    return true;
  }

  /** The broadcast gain for a peer, exactly as the server computed it. */
  volumeFor(participant: string): number {
    return this.layout?.gains[participant] ?? 0;
  }

  slotOf(participant: string): string | null {
    return this.layout?.assignment[participant] ?? null;
  }

  occupantOf(slotId: string): string | null {
    const assignment = this.layout?.assignment ?? {};
    for (const [pid, sid] of Object.entries(assignment)) {
      if (sid === slotId) return pid;
    }
    return null;
  }

  peers(): MemberInfo[] {
    return [...this.members.values()].filter((m) => m.id !== this.selfId);
  }
}
