// Session state machine, kept free of DOM so it can run under vitest.
// The renderer reads ConsoleState; gestures go through sendDirection /
// sendVector, which enforce the client-side cooldown mirror (the server
// stays authoritative via input_ack).

import {
  ClientMessage,
  Condition,
  Frame,
  MapInfo,
  ServerMessage,
  TerminalMsg,
} from "./protocol.js";

export const COMMAND_SPEED = 0.3; // m/s, matches the server's s

export interface TrialLogEntry {
  t: number; // sim clock of the accepted command
  sent: [number, number];
}

export interface ConsoleState {
  sessionId: string | null;
  condition: Condition | null;
  map: MapInfo | null;
  frame: Frame | null;
  terminal: TerminalMsg | null;
  connected: boolean;
  trialLog: TrialLogEntry[];
  limitFlashUntil: number; // wall-clock ms; renderer flashes while now < this
  lastError: string | null;
}

const LIMIT_FLASH_MS = 600;

export class ConsoleController {
  state: ConsoleState = {
    sessionId: null,
    condition: null,
    map: null,
    frame: null,
    terminal: null,
    connected: false,
    trialLog: [],
    limitFlashUntil: 0,
    lastError: null,
  };

  private cooldownUntil = 0; // wall-clock ms

  constructor(
    private send: (msg: ClientMessage) => void,
    private now: () => number = () => Date.now(),
  ) {}

  // -- lifecycle --------------------------------------------------------

  createSession(condition: Condition, seed?: number): void {
    this.state.condition = condition;
    this.send({ type: "create", condition, seed });
  }

  setConnected(up: boolean): void {
    this.state.connected = up;
    if (!up) {
      this.cooldownUntil = 0;
    }
  }

  // -- gestures ---------------------------------------------------------

  cooldownRemaining(): number {
    return Math.max(0, this.cooldownUntil - this.now()) / 1000;
  }

  inputEnabled(): boolean {
    return (
      this.state.connected &&
      this.state.terminal === null &&
      this.cooldownRemaining() === 0
    );
  }

  /** Tap on a directional pad. Returns true iff a message went out. */
  sendDirection(index: number): boolean {
    if (!this.inputEnabled() || this.state.condition === null) {
      return false;
    }
    this.startCooldown();
    this.send({ type: "input", direction: index });
    return true;
  }

  /** Joystick release on an all-directions session; (dx, dy) need not be
   * normalized. Returns true iff a message went out. */
  sendVector(dx: number, dy: number): boolean {
    if (!this.inputEnabled()) {
      return false;
    }
    const norm = Math.hypot(dx, dy);
    if (norm === 0) {
      return false;
    }
    const v: [number, number] = [
      (dx / norm) * COMMAND_SPEED,
      (dy / norm) * COMMAND_SPEED,
    ];
    this.startCooldown();
    this.send({ type: "input", vector: v });
    return true;
  }

  private startCooldown(): void {
    const period = this.state.condition?.period ?? 1.0;
    this.cooldownUntil = this.now() + period * 1000;
  }

  // -- server messages --------------------------------------------------

  handleMessage(msg: ServerMessage): void {
    switch (msg.type) {
      case "created":
        this.state.sessionId = msg.session;
        this.state.map = msg.map;
        this.state.frame = msg.frame;
        this.state.terminal = null;
        this.state.trialLog = [];
        break;
      case "frame":
        this.state.frame = msg;
        break;
      case "input_ack":
        if (msg.status === "accepted" && this.state.frame !== null) {
          this.state.trialLog.push({ t: this.state.frame.t, sent: msg.sent });
        } else if (msg.status === "limited") {
          // server-side limit; flash, never touch the trial log
          this.state.limitFlashUntil = this.now() + LIMIT_FLASH_MS;
        }
        break;
      case "terminal":
        this.state.terminal = msg;
        break;
      case "error":
        this.state.lastError = msg.message;
        break;
    }
  }

  limitFlashing(): boolean {
    return this.now() < this.state.limitFlashUntil;
  }
}
