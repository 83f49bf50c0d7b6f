// Corner-pin editing model. Dragging is forgiving: invalid quads render
// with a warning and are only blocked at save time. serializeProfile emits
// the same canonical bytes as the service's own writer, so a saved profile
// round-trips byte-identically through GET/PUT /profile.

import { Quad, asQuad, quadDefect } from "./quad.js";

export interface ProfileSlot {
  id: string;
  label: string;
  distance_m: number;
  quad: Quad;
}

export interface Profile {
  profile_version: number;
  slots: ProfileSlot[];
}

export function parseProfile(text: string): Profile {
  const doc = JSON.parse(text);
  return {
    profile_version: doc.profile_version,
    slots: doc.slots.map((s: { id: string; label: string; distance_m: number; quad: number[][] }) => ({
      id: s.id,
      label: s.label,
      distance_m: s.distance_m,
      quad: asQuad(s.quad),
    })),
  };
}

/** Decimal with at most 9 fractional digits, trailing zeros trimmed. */
export function formatNumber(x: number): string {
  if (Object.is(x, -0)) x = 0;
  let s = x.toFixed(9);
  s = s.replace(/0+$/, "");
  if (s.endsWith(".")) s += "0";
  return s;
}

export function serializeProfile(profile: Profile): string {
  const lines = ["{", `  "profile_version": ${profile.profile_version},`, '  "slots": ['];
  profile.slots.forEach((slot, i) => {
    const quad = slot.quad
      .map(([x, y]) => `[${formatNumber(x)}, ${formatNumber(y)}]`)
      .join(", ");
    const comma = i < profile.slots.length - 1 ? "," : "";
    lines.push(
      "    {",
      `      "id": ${JSON.stringify(slot.id)},`,
      `      "label": ${JSON.stringify(slot.label)},`,
      `      "distance_m": ${formatNumber(slot.distance_m)},`,
      `      "quad": [${quad}]`,
      "    }" + comma,
    );
  });
  lines.push("  ]", "}");
  return lines.join("\n") + "\n";
}

export class PinEditor {
  profile: Profile;

  constructor(profile: Profile) {
    this.profile = {
      profile_version: profile.profile_version,
      slots: profile.slots.map((s) => ({
        ...s,
        quad: s.quad.map(([x, y]) => [x, y]) as Quad,
      })),
    };
  }

  slot(slotId: string): ProfileSlot {
    const slot = this.profile.slots.find((s) => s.id === slotId);
    if (!slot) throw new Error(`no slot ${slotId}`);
    return slot;
  }

  moveCorner(slotId: string, cornerIndex: number, point: [number, number]): void {
    if (cornerIndex < 0 || cornerIndex > 3) throw new Error("corner index 0..3");
    this.slot(slotId).quad[cornerIndex] = [point[0], point[1]];
  }

  /** null when the quad is drawable, else the reason it is rejected. */
  defect(slotId: string): string | null {
    return quadDefect(this.slot(slotId).quad);
  }

  problems(): string[] {
    const found: string[] = [];
    const seen = new Set<string>();
    for (const slot of this.profile.slots) {
      if (seen.has(slot.id)) found.push(`slot '${slot.id}': duplicate slot id`);
      seen.add(slot.id);
      if (!(slot.distance_m > 0)) {
        found.push(`slot '${slot.id}': distance_m must be a positive number`);
      }
      const defect = quadDefect(slot.quad);
      if (defect) found.push(`slot '${slot.id}': ${defect}`);
    }
    return found;
  }

  canSave(): boolean {
    return this.problems().length === 0;
  }

  serialize(): string {
    return serializeProfile(this.profile);
  }
}
