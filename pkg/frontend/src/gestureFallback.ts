// Pointer-wiggle fallback for rooms without a hand sensor: horizontal
// pointer movement runs through the same reversal-count detector and
// thresholds as the sensor path, with pixels mapped to millimeters at 3 px
// per mm.

export type WaveDirection = "Left" | "Right";

export interface DetectorConfig {
  windowS: number;
  minAmplitudeMm: number;
  minReversals: number;
  cooldownS: number;
  jitterMm: number;
}

export const DEFAULT_CONFIG: DetectorConfig = {
  windowS: 1.0,
  minAmplitudeMm: 80,
  minReversals: 3,
  cooldownS: 1.5,
  jitterMm: 2,
};

export const PX_PER_MM = 3;

export class PointerWaveDetector {
  private window: Array<[number, number]> = [];
  private lastEventT: number | null = null;

  constructor(
    private config: DetectorConfig = DEFAULT_CONFIG,
    private pxPerMm: number = PX_PER_MM,
  ) {}

  reset(): void {
    this.window = [];
    this.lastEventT = null;
  }

  /** Feed one pointer sample (seconds, pixels); non-null on a completed wave. */
  feed(tS: number, xPx: number): WaveDirection | null {
    if (!Number.isFinite(tS) || !Number.isFinite(xPx)) return null;
    const xMm = xPx / this.pxPerMm;
    this.window.push([tS, xMm]);
    const horizon = tS - this.config.windowS;
    while (this.window.length && this.window[0][0] < horizon) this.window.shift();
    if (this.lastEventT !== null && tS - this.lastEventT < this.config.cooldownS) {
      return null;
    }
    return this.evaluate(tS);
  }

  private evaluate(now: number): WaveDirection | null {
    if (this.window.length < 2 || this.window[0][0] >= now) return null;
    const xs = this.window.map(([, x]) => x);
    if (Math.max(...xs) - Math.min(...xs) < this.config.minAmplitudeMm) return null;
    let reversals = 0;
    let lastSign = 0;
    for (let i = 1; i < xs.length; i++) {
      const dx = xs[i] - xs[i - 1];
      if (Math.abs(dx) < this.config.jitterMm) continue;
      const sign = dx > 0 ? 1 : -1;
      if (lastSign !== 0 && sign !== lastSign) reversals += 1;
      lastSign = sign;
    }
    if (lastSign === 0 || reversals < this.config.minReversals) return null;
    this.lastEventT = now;
    return lastSign > 0 ? "Right" : "Left";
  }
}
