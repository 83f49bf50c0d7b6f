// Operator console: join a room, see peers warped into their calibrated
// quads, hear them at the broadcast gains, rotate or place them, and drag
// corner pins to recalibrate. Opening the page with #projection shows the
// bare fullscreen projection surface for the projector output.

import { PointerWaveDetector } from "./gestureFallback.js";
import { quadToPixels, tileTransform } from "./homography.js";
import { PeerMesh } from "./media.js";
import { PinEditor, parseProfile } from "./pinEditor.js";
import {
  JoinedPayload,
  PeerJoinedPayload,
  PeerLeftPayload,
  WireMessage,
} from "./protocol.js";
import { Quad } from "./quad.js";
import { RoomConnection } from "./transport.js";
import { ViewModel } from "./viewmodel.js";

const $ = <T extends HTMLElement>(id: string): T =>
  document.getElementById(id) as T;

const projectionOnly = location.hash === "#projection";

const view = new ViewModel();
let connection: RoomConnection | null = null;
let mesh: PeerMesh | null = null;
let editor: PinEditor | null = null;
let selectedSlot = "";
const mediaEls = new Map<string, { video: HTMLVideoElement; audio: HTMLAudioElement }>();

function stageSize(): { w: number; h: number } {
  const stage = $("stage");
  return { w: stage.clientWidth, h: stage.clientHeight };
}

function quadForSlot(slotId: string): Quad | null {
  if (editor) {
    const slot = editor.profile.slots.find((s) => s.id === slotId);
    if (slot) return slot.quad;
  }
  const slot = view.slots.find((s) => s.id === slotId);
  return slot ? (slot.quad as Quad) : null;
}

function renderTiles(): void {
  const stage = $("stage");
  const { w, h } = stageSize();
  const seen = new Set<string>();
  for (const member of view.peers()) {
    if (member.observer) continue;
    seen.add(member.id);
    let tile = document.getElementById(`tile-${member.id}`);
    if (!tile) {
      tile = document.createElement("div");
      tile.id = `tile-${member.id}`;
      tile.className = "tile";
      const media = mediaEls.get(member.id);
      if (media) tile.appendChild(media.video);
      const label = document.createElement("span");
      label.className = "tile-label";
      label.textContent = member.display_name || member.id;
      tile.appendChild(label);
      stage.appendChild(tile);
    }
    const slotId = view.slotOf(member.id);
    const quad = slotId ? quadForSlot(slotId) : null;
    if (!slotId || !quad) {
      tile.style.display = "none"; // unassigned members are not projected
      continue;
    }
    try {
      tile.style.display = "";
      tile.style.width = "320px";
      tile.style.height = "240px";
      tile.style.transformOrigin = "0 0";
      tile.style.transform = tileTransform(320, 240, quadToPixels(quad, w, h));
    } catch {
      tile.style.display = "none"; // degenerate quad: hide until re-pinned
    }
    const media = mediaEls.get(member.id);
    if (media) media.audio.volume = view.volumeFor(member.id);
  }
  for (const tile of [...stage.querySelectorAll(".tile")]) {
    const pid = tile.id.replace("tile-", "");
    if (!seen.has(pid)) tile.remove();
  }
}

function renderRoster(): void {
  if (projectionOnly) return;
  const roster = $("roster");
  roster.innerHTML = "";
  const slotIds = view.layout?.slot_order ?? [];
  for (const member of view.members.values()) {
    const row = document.createElement("li");
    const slot = view.slotOf(member.id);
    const gain = view.volumeFor(member.id).toFixed(3);
    const role = member.observer ? " (observer)" : "";
    row.textContent = `${member.display_name || member.id}${role} - ${
      slot ?? "unassigned"
    } - gain ${gain} `;
    if (!member.observer) {
      const select = document.createElement("select");
      select.innerHTML =
        `<option value="">place...</option>` +
        slotIds.map((s) => `<option value="${s}">${s}</option>`).join("");
      select.onchange = () => {
        if (select.value) connection?.place(member.id, select.value);
      };
      row.appendChild(select);
    }
    roster.appendChild(row);
  }
  $("status").textContent =
    view.statusMessage ||
    `room v${view.layout?.version ?? "-"} seq ${view.lastSeq}`;
}

function renderPins(): void {
  if (projectionOnly || !editor) return;
  const overlay = $("pins");
  overlay.innerHTML = "";
  if (!selectedSlot) return;
  const { w, h } = stageSize();
  const quad = editor.slot(selectedSlot).quad;
  quad.forEach(([x, y], index) => {
    const pin = document.createElement("div");
    pin.className = "pin";
    pin.style.left = `${x * w - 6}px`;
    pin.style.top = `${y * h - 6}px`;
    pin.onpointerdown = (down) => {
      pin.setPointerCapture(down.pointerId);
      pin.onpointermove = (move) => {
        const rect = overlay.getBoundingClientRect();
        editor?.moveCorner(selectedSlot, index, [
          (move.clientX - rect.left) / rect.width,
          (move.clientY - rect.top) / rect.height,
        ]);
        refreshEditorState();
        renderPins();
        renderTiles();
      };
      pin.onpointerup = () => {
        pin.onpointermove = null;
      };
    };
    overlay.appendChild(pin);
  });
}

function refreshEditorState(): void {
  if (!editor) return;
  const problems = editor.problems();
  $("pin-warning").textContent = problems.join("; ");
  ($("save-profile") as HTMLButtonElement).disabled = !editor.canSave();
}

async function loadProfileIntoEditor(base: string): Promise<void> {
  const response = await fetch(`${base}/profile`);
  editor = new PinEditor(parseProfile(await response.text()));
  const select = $("slot-select") as HTMLSelectElement;
  select.innerHTML = editor.profile.slots
    .map((s) => `<option value="${s.id}">${s.id} (${s.label})</option>`)
    .join("");
  selectedSlot = editor.profile.slots[0]?.id ?? "";
  select.value = selectedSlot;
  refreshEditorState();
  renderPins();
}

function handleMessage(msg: WireMessage): void {
  const advanced = view.applyMessage(msg);
  if (msg.type === "signal") {
    void mesh?.handleSignal(msg.from ?? "", msg.payload);
    return;
  }
  if (advanced && msg.type === "joined") {
    const payload = msg.payload as JoinedPayload;
    for (const member of payload.members) {
      if (!member.observer) prepareMedia(member.id);
    }
  }
  if (advanced && msg.type === "peer-joined") {
    const payload = msg.payload as PeerJoinedPayload;
    if (!payload.observer) prepareMedia(payload.participant);
  }
  if (msg.type === "peer-left") {
    const payload = msg.payload as PeerLeftPayload;
    mesh?.drop(payload.participant);
    mediaEls.delete(payload.participant);
  }
  renderTiles();
  renderRoster();
}

function prepareMedia(peerId: string): void {
  if (peerId === view.selfId || mediaEls.has(peerId)) return;
  const video = document.createElement("video");
  video.autoplay = true;
  video.muted = true; // sound goes through the volume-controlled audio element
  video.playsInline = true;
  const audio = document.createElement("audio");
  audio.autoplay = true;
  mediaEls.set(peerId, { video, audio });
  document.body.appendChild(audio);
  mesh?.connectTo(peerId);
}

async function join(): Promise<void> {
  const addr = ($("addr") as HTMLInputElement).value.trim();
  const room = ($("room") as HTMLInputElement).value.trim();
  const selfId = ($("pid") as HTMLInputElement).value.trim();
  const name = ($("name") as HTMLInputElement).value.trim();
  const observer = ($("observer") as HTMLInputElement).checked;
  if (!addr || !room || !selfId) return;

  let stream: MediaStream | null = null;
  if (!observer) {
    try {
      stream = await navigator.mediaDevices.getUserMedia({ video: true, audio: true });
    } catch {
      stream = null; // join without media; tiles stay blank
    }
  }
  connection = new RoomConnection(addr, room, selfId, {
    onMessage: handleMessage,
    onClose: (reason) => {
      view.connection = "closed";
      $("status").textContent = `disconnected: ${reason}`;
    },
  });
  mesh = new PeerMesh(selfId, connection, stream, (peerId, remote) => {
    const media = mediaEls.get(peerId);
    if (!media) return;
    media.video.srcObject = remote;
    media.audio.srcObject = remote;
    media.audio.volume = view.volumeFor(peerId);
  });
  connection.connect(name, observer);
  const httpBase = addr.startsWith("http") ? addr : `http://${addr}`;
  if (!projectionOnly) await loadProfileIntoEditor(httpBase.replace(/\/$/, ""));
}

function wireControls(): void {
  $("join").onclick = () => void join();
  $("rotate-forward").onclick = () => connection?.rotate("Forward");
  $("rotate-backward").onclick = () => connection?.rotate("Backward");
  ($("slot-select") as HTMLSelectElement).onchange = (event) => {
    selectedSlot = (event.target as HTMLSelectElement).value;
    renderPins();
  };
  $("save-profile").onclick = async () => {
    if (!editor?.canSave() || !connection) return;
    const addr = ($("addr") as HTMLInputElement).value.trim();
    const base = addr.startsWith("http") ? addr : `http://${addr}`;
    const response = await fetch(`${base.replace(/\/$/, "")}/profile`, {
      method: "PUT",
      headers: { "content-type": "application/json" },
      body: editor.serialize(),
    });
    $("pin-warning").textContent = response.ok ? "profile saved" : "save failed";
  };

  const wavePad = $("wave-pad");
  const detector = new PointerWaveDetector();
  wavePad.onpointermove = (event) => {
    const direction = detector.feed(performance.now() / 1000, event.clientX);
    if (direction) connection?.wave(direction);
  };
}

document.addEventListener("DOMContentLoaded", () => {
  if (projectionOnly) {
    document.body.classList.add("projection");
  } else {
    wireControls();
  }
  window.addEventListener("resize", () => {
    renderTiles();
    renderPins();
  });
});
