// Canvas drawing: map, robot marker + trail, goal-posterior heatmap
// overlay, confidence meter. All values come straight from the latest
// frame; the heatmap is rescaled to its own max purely for visibility.

import { ConsoleState } from "./console.js";
import { Frame, MapInfo } from "./protocol.js";

const TRAIL_MAX = 4000;

export class MapView {
  private trail: [number, number][] = [];
  private trailSession: string | null = null;

  constructor(private canvas: HTMLCanvasElement) {}

  private scale(map: MapInfo): number {
    return Math.min(
      this.canvas.width / map.width,
      this.canvas.height / map.height,
    );
  }

  private toPx(map: MapInfo, wx: number, wy: number): [number, number] {
    const k = this.scale(map);
    const cx = (wx - map.origin[0]) / map.resolution;
    const cy = (wy - map.origin[1]) / map.resolution;
    // canvas y grows downward; world y grows upward
    return [cx * k, this.canvas.height - cy * k];
  }

  draw(state: ConsoleState): void {
    const ctx = this.canvas.getContext("2d");
    if (!ctx || !state.map) return;
    const map = state.map;
    const k = this.scale(map);
    ctx.fillStyle = "#1b1f24";
    ctx.fillRect(0, 0, this.canvas.width, this.canvas.height);

    // occupancy
    ctx.fillStyle = "#555c66";
    for (let y = 0; y < map.height; y++) {
      const row = map.occupied[y];
      for (let x = 0; x < map.width; x++) {
        if (row[x] === "#") {
          ctx.fillRect(x * k, this.canvas.height - (y + 1) * k, k, k);
        }
      }
    }

    const frame = state.frame;
    if (frame) {
      this.drawHeatmap(ctx, map, frame, k);
      this.updateTrail(frame);
      this.drawTrail(ctx, map);
      this.drawRobot(ctx, map, frame);
      if (frame.goal_cell) {
        this.drawCell(ctx, map, frame.goal_cell, "rgba(80, 200, 255, 0.9)", k);
      }
    }
    // true goal marker
    this.drawCell(ctx, map, map.goal_cell, "rgba(120, 255, 120, 0.9)", k);
  }

  private drawHeatmap(
    ctx: CanvasRenderingContext2D,
    map: MapInfo,
    frame: Frame,
    k: number,
  ): void {
    const hm = frame.heatmap;
    let max = 0;
    for (const v of hm.values) max = Math.max(max, v);
    if (max <= 0) return;
    const bw = (map.width / hm.width) * k;
    const bh = (map.height / hm.height) * k;
    for (let y = 0; y < hm.height; y++) {
      for (let x = 0; x < hm.width; x++) {
        const v = hm.values[y * hm.width + x];
        if (v <= 0) continue;
        // display-only rescale: per-frame max shows as full intensity
        ctx.fillStyle = `rgba(255, 120, 40, ${(0.65 * v) / max})`;
        ctx.fillRect(x * bw, this.canvas.height - (y + 1) * bh, bw, bh);
      }
    }
  }

  private updateTrail(frame: Frame): void {
    if (frame.session !== this.trailSession) {
      this.trail = [];
      this.trailSession = frame.session;
    }
    const last = this.trail[this.trail.length - 1];
    if (!last || last[0] !== frame.x || last[1] !== frame.y) {
      this.trail.push([frame.x, frame.y]);
      if (this.trail.length > TRAIL_MAX) this.trail.shift();
    }
  }

  private drawTrail(ctx: CanvasRenderingContext2D, map: MapInfo): void {
    if (this.trail.length < 2) return;
    ctx.strokeStyle = "rgba(130, 170, 255, 0.8)";
    ctx.lineWidth = 2;
    ctx.beginPath();
    this.trail.forEach(([wx, wy], i) => {
      const [px, py] = this.toPx(map, wx, wy);
      if (i === 0) ctx.moveTo(px, py);
      else ctx.lineTo(px, py);
    });
    ctx.stroke();
  }

  private drawRobot(
    ctx: CanvasRenderingContext2D,
    map: MapInfo,
    frame: Frame,
  ): void {
    const [px, py] = this.toPx(map, frame.x, frame.y);
    ctx.fillStyle = "#e8eef7";
    ctx.beginPath();
    ctx.arc(px, py, Math.max(4, (0.25 / map.resolution) * this.scale(map)), 0, 2 * Math.PI);
    ctx.fill();
  }

  private drawCell(
    ctx: CanvasRenderingContext2D,
    map: MapInfo,
    cell: [number, number],
    color: string,
    k: number,
  ): void {
    ctx.strokeStyle = color;
    ctx.lineWidth = 2;
    ctx.strokeRect(cell[0] * k, this.canvas.height - (cell[1] + 1) * k, k, k);
  }
}

export function renderConfidence(el: HTMLElement, state: ConsoleState): void {
  const c = state.frame?.confidence ?? 0;
  const bar = el.querySelector<HTMLElement>(".bar-fill");
  const label = el.querySelector<HTMLElement>(".bar-label");
  if (bar) bar.style.width = `${(100 * c).toFixed(1)}%`;
  if (label) label.textContent = c.toFixed(2);
}

export function renderCounters(el: HTMLElement, state: ConsoleState): void {
  const f = state.frame;
  el.textContent = f
    ? `t ${f.t.toFixed(1)} s · collisions ${f.collisions} · path ${f.path_length.toFixed(2)} m`
    : "waiting for frames";
}

export function renderResultCard(el: HTMLElement, state: ConsoleState): void {
  const terminal = state.terminal;
  if (!terminal) {
    el.hidden = true;
    return;
  }
  el.hidden = false;
  const r = terminal.result;
  const fmt = (v: [number, number]) => `(${v[0].toFixed(2)}, ${v[1].toFixed(2)})`;
  const rows = terminal.command_log
    .map((e) => {
      const diff = e.sent[0] !== e.applied[0] || e.sent[1] !== e.applied[1];
      return `<tr class="${diff ? "diff" : ""}"><td>${e.t.toFixed(1)}</td><td>${fmt(e.sent)}</td><td>${fmt(e.applied)}</td></tr>`;
    })
    .join("");
  el.innerHTML = `
    <h2>${r.success ? "Success" : "Failed"}</h2>
    <p>collisions ${r.collisions} · time ${r.elapsed_s.toFixed(1)} s ·
       path ${r.path_length_m.toFixed(2)} m</p>
    <table>
      <thead><tr><th>t</th><th>sent</th><th>applied</th></tr></thead>
      <tbody>${rows}</tbody>
    </table>`;
}
