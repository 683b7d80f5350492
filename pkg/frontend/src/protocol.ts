// Wire schema for the teleop service websocket. One connection = one
// session; every message is a JSON text.

export type DirectionSet = "all" | "eight" | "four";
export type ControlMode = "shared" | "direct";

export interface Condition {
  directions: DirectionSet;
  accuracy: number;
  period: number;
  mode: ControlMode;
}

export interface MapInfo {
  width: number;
  height: number;
  resolution: number;
  origin: [number, number];
  occupied: string[]; // '#' blocked / '.' free, row 0 = min y
  goal_cell: [number, number];
  period: number;
}

export interface Heatmap {
  width: number;
  height: number;
  values: number[]; // row-major, sums to ~1
}

export interface Frame {
  type: "frame";
  session: string;
  t: number;
  x: number;
  y: number;
  collisions: number;
  path_length: number;
  confidence: number;
  goal_cell: [number, number] | null;
  status: "running" | "succeeded" | "failed";
  heatmap: Heatmap;
}

export interface CreatedMsg {
  type: "created";
  session: string;
  map: MapInfo;
  frame: Frame;
}

export interface InputAck {
  type: "input_ack";
  status: "accepted" | "limited" | "rejected";
  sent: [number, number];
}

export interface CommandLogEntry {
  t: number;
  sent: [number, number];
  applied: [number, number];
}

export interface TerminalMsg {
  type: "terminal";
  session: string;
  result: {
    success: boolean;
    collisions: number;
    elapsed_s: number;
    path_length_m: number;
  };
  command_log: CommandLogEntry[];
}

export interface ErrorMsg {
  type: "error";
  message: string;
}

export type ServerMessage = CreatedMsg | Frame | InputAck | TerminalMsg | ErrorMsg;

export interface CreateMsg {
  type: "create";
  condition: Condition;
  seed?: number;
}

export interface InputMsg {
  type: "input";
  direction?: number;
  vector?: [number, number];
}

export type ClientMessage = CreateMsg | InputMsg;

// index order matches the server's direction sets (angle = index * step)
export const EIGHT_LABELS = ["E", "NE", "N", "NW", "W", "SW", "S", "SE"];
export const FOUR_LABELS = ["E", "N", "W", "S"];

export function directionCount(d: DirectionSet): number {
  return d === "four" ? 4 : 8;
}

export function directionAngle(d: DirectionSet, index: number): number {
  const step = d === "four" ? Math.PI / 2 : Math.PI / 4;
  return index * step;
}
