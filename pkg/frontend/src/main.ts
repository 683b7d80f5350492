// App wiring: socket lifecycle, condition picker, input widgets.

import { ConsoleController } from "./console.js";
import {
  Condition,
  ControlMode,
  DirectionSet,
  EIGHT_LABELS,
  FOUR_LABELS,
  ServerMessage,
  directionCount,
} from "./protocol.js";
import {
  MapView,
  renderConfidence,
  renderCounters,
  renderResultCard,
} from "./render.js";

const $ = <T extends HTMLElement>(id: string): T => {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing element #${id}`);
  return el as T;
};

function wsUrl(): string {
  const scheme = location.protocol === "https:" ? "wss:" : "ws:";
  return `${scheme}//${location.host}/ws`;
}

let socket: WebSocket | null = null;
const controller = new ConsoleController((msg) => {
  socket?.send(JSON.stringify(msg));
});

const mapView = new MapView($("map") as unknown as HTMLCanvasElement);
const banner = $("banner");
const pad = $("pad");
const joystick = $("joystick");
const limitLight = $("limit-light");

function currentCondition(): Condition {
  return {
    directions: ($("directions") as HTMLSelectElement).value as DirectionSet,
    accuracy: parseFloat(($("accuracy") as HTMLSelectElement).value),
    period: 1.0,
    mode: ($("mode") as HTMLSelectElement).value as ControlMode,
  };
}

function connect(): void {
  socket = new WebSocket(wsUrl());
  socket.onopen = () => {
    controller.setConnected(true);
    banner.hidden = true;
    controller.createSession(currentCondition());
    buildInputWidget();
  };
  socket.onmessage = (ev) => {
    controller.handleMessage(JSON.parse(ev.data) as ServerMessage);
  };
  const down = () => {
    controller.setConnected(false);
    banner.hidden = false;
    setTimeout(connect, 1500);
  };
  socket.onclose = down;
  socket.onerror = () => socket?.close();
}

function buildInputWidget(): void {
  const cond = controller.state.condition;
  pad.innerHTML = "";
  if (!cond) return;
  if (cond.directions === "all") {
    pad.hidden = true;
    joystick.hidden = false;
    return;
  }
  pad.hidden = false;
  joystick.hidden = true;
  const labels = cond.directions === "four" ? FOUR_LABELS : EIGHT_LABELS;
  for (let i = 0; i < directionCount(cond.directions); i++) {
    const b = document.createElement("button");
    b.textContent = labels[i];
    b.className = `dir dir-${labels[i].toLowerCase()}`;
    b.addEventListener("click", () => controller.sendDirection(i));
    pad.appendChild(b);
  }
}

// virtual joystick: track the drag, send the release vector
let dragStart: [number, number] | null = null;
joystick.addEventListener("pointerdown", (ev) => {
  dragStart = [ev.clientX, ev.clientY];
  joystick.setPointerCapture(ev.pointerId);
});
joystick.addEventListener("pointerup", (ev) => {
  if (!dragStart) return;
  const dx = ev.clientX - dragStart[0];
  const dy = dragStart[1] - ev.clientY; // screen y is inverted
  dragStart = null;
  if (Math.hypot(dx, dy) > 8) {
    controller.sendVector(dx, dy);
  }
});

function tick(): void {
  mapView.draw(controller.state);
  renderConfidence($("confidence"), controller.state);
  renderCounters($("counters"), controller.state);
  renderResultCard($("result"), controller.state);
  limitLight.classList.toggle("on", controller.limitFlashing());
  const cooling = controller.cooldownRemaining();
  const disabled = !controller.inputEnabled();
  pad.querySelectorAll("button").forEach((b) => (b.disabled = disabled));
  joystick.classList.toggle("disabled", disabled);
  $("cooldown").textContent =
    cooling > 0 ? `cooldown ${cooling.toFixed(1)} s` : "ready";
  if (controller.state.lastError) {
    $("errors").textContent = controller.state.lastError;
  }
  requestAnimationFrame(tick);
}

$("restart").addEventListener("click", () => {
  socket?.close();
});

connect();
requestAnimationFrame(tick);
