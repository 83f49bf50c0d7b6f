// Thin browser WebSocket wrapper speaking the room wire protocol.

import { WireMessage, makeMessage } from "./protocol.js";

export interface ConnectionHandlers {
  onMessage: (msg: WireMessage) => void;
  onClose?: (reason: string) => void;
}

export class RoomConnection {
  private ws: WebSocket | null = null;

  constructor(
    private addr: string,
    private room: string,
    private selfId: string,
    private handlers: ConnectionHandlers,
  ) {}

  connect(displayName: string, observer = false): void {
    const base = this.addr.startsWith("ws") ? this.addr : `ws://${this.addr}`;
    this.ws = new WebSocket(`${base.replace(/\/$/, "")}/ws`);
    this.ws.onopen = () => {
      this.send(
        makeMessage("join", {
          room: this.room,
          from: this.selfId,
          payload: { display_name: displayName, observer },
        }),
      );
    };
    this.ws.onmessage = (event) => {
      this.handlers.onMessage(JSON.parse(event.data as string) as WireMessage);
    };
    this.ws.onclose = (event) => {
      this.handlers.onClose?.(event.reason || "connection closed");
      this.ws = null;
    };
  }

  get connected(): boolean {
    return this.ws !== null && this.ws.readyState === WebSocket.OPEN;
  }

  send(msg: WireMessage): void {
    this.ws?.send(JSON.stringify(msg));
  }

  rotate(direction: "Forward" | "Backward"): void {
    this.send(makeMessage("layout-rotate", { payload: { direction } }));
  }

  wave(direction: "Left" | "Right"): void {
    this.send(
      makeMessage("gesture-event", { payload: { kind: "wave", direction } }),
    );
  }

  place(participant: string, slot: string): void {
    this.send(makeMessage("layout-set", { payload: { participant, slot } }));
  }

  signal(to: string, payload: unknown): void {
    this.send(makeMessage("signal", { room: this.room, to, payload }));
  }

  close(): void {
    this.ws?.close();
    this.ws = null;
  }
}
