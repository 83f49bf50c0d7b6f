import { readFileSync } from "node:fs";
import { describe, expect, it } from "vitest";

import { LayoutSnapshot, WireMessage } from "../src/protocol.js";
import { ViewModel } from "../src/viewmodel.js";

interface StreamFixture {
  client: string;
  messages: WireMessage[];
  expected: {
    members: string[];
    layout: LayoutSnapshot;
    digest: string;
    seq: number;
  };
}

const fixture: StreamFixture = JSON.parse(
  readFileSync(new URL("./fixtures/broadcast_stream.json", import.meta.url), "utf-8"),
);

function replay(messages: WireMessage[]): ViewModel {
  const vm = new ViewModel();
  for (const msg of messages) vm.applyMessage(msg);
  return vm;
}

describe("broadcast determinism", () => {
  it("replaying the recorded stream reproduces the recorded final state", () => {
    const vm = replay(fixture.messages);
    expect(vm.layout).toEqual(fixture.expected.layout);
    expect([...vm.members.keys()].sort()).toEqual(fixture.expected.members);
    expect(vm.lastSeq).toBe(fixture.expected.seq);
  });

  it("two replays land on identical ViewModels", () => {
    const a = replay(fixture.messages);
    const b = replay(fixture.messages);
    expect(a.layout).toEqual(b.layout);
    expect([...a.members.entries()]).toEqual([...b.members.entries()]);
    expect(a.lastSeq).toBe(b.lastSeq);
  });

  it("audio volumes equal the broadcast gains exactly", () => {
    const vm = replay(fixture.messages);
    const gains = fixture.expected.layout.gains;
    for (const [pid, gain] of Object.entries(gains)) {
      expect(vm.volumeFor(pid)).toBe(gain); // exact, never recomputed
    }
    expect(vm.volumeFor("nobody")).toBe(0);
  });

  it("drops stale seq values without changing state", () => {
    const vm = replay(fixture.messages);
    const before = JSON.stringify(vm.layout);
    const stale: WireMessage = {
      v: 1,
      type: "layout-state",
      seq: 1,
      room: "demo",
      payload: { assignment: {}, version: 99, gains: {}, queue: [], slot_order: [] },
    };
    expect(vm.applyMessage(stale)).toBe(false);
    expect(JSON.stringify(vm.layout)).toBe(before);
  });

  it("every layout broadcast in the stream is seq-ordered", () => {
    const seqs = fixture.messages
      .map((m) => m.seq)
      .filter((s): s is number => s !== undefined);
    const sorted = [...seqs].sort((a, b) => a - b);
    expect(seqs).toEqual(sorted);
  });

  it("peer-left removes the tile's member", () => {
    const vm = new ViewModel();
    vm.applyMessage(fixture.messages[0]); // joined snapshot
    vm.applyMessage({
      v: 1,
      type: "peer-joined",
      seq: vm.lastSeq + 1,
      payload: {
        participant: "px",
        display_name: "X",
        observer: false,
        layout: vm.layout,
      },
    });
    expect(vm.members.has("px")).toBe(true);
    vm.applyMessage({
      v: 1,
      type: "peer-left",
      seq: vm.lastSeq + 1,
      payload: { participant: "px" },
    });
    expect(vm.members.has("px")).toBe(false);
  });

  it("error messages surface in the status line only", () => {
    const vm = replay(fixture.messages);
    const before = vm.layout;
    vm.applyMessage({
      v: 1,
      type: "error",
      payload: { code: "no-such-peer", message: "gone" },
    });
    expect(vm.statusMessage).toContain("no-such-peer");
    expect(vm.layout).toBe(before);
  });
});
