// Wire protocol types, mirroring the server envelope exactly:
// v, type, seq, room, from, to, payload.

export const PROTOCOL_VERSION = 1;

export interface WireMessage {
  v: number;
  type: string;
  seq?: number;
  room?: string;
  from?: string;
  to?: string;
  payload?: unknown;
}

export interface LayoutSnapshot {
  assignment: Record<string, string>;
  version: number;
  gains: Record<string, number>;
  queue: string[];
  slot_order: string[];
}

export interface MemberInfo {
  id: string;
  display_name: string;
  observer: boolean;
}

export interface SlotInfo {
  id: string;
  label: string;
  distance_m: number;
  quad: number[][];
}

export interface JoinedPayload {
  self: string;
  members: MemberInfo[];
  slots: SlotInfo[];
  policy: { mode: string; rank_table: number[] };
  layout: LayoutSnapshot;
}

export interface PeerJoinedPayload {
  participant: string;
  display_name: string;
  observer: boolean;
  layout: LayoutSnapshot;
}

export interface PeerLeftPayload {
  participant: string;
}

export interface ErrorPayload {
  code: string;
  message: string;
}

export function makeMessage(
  type: string,
  fields: Partial<Omit<WireMessage, "v" | "type">> = {},
): WireMessage {
  return { v: PROTOCOL_VERSION, type, ...fields };
}
