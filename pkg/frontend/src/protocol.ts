// Wire types for the live bridge protocol (v1). One JSON envelope per
// WebSocket text frame; see docs/protocol.md in the repository root.

export const PROTOCOL_VERSION = 1;

export interface Pose {
    p: [number, number, number];
    r: [number, number, number];
}

export interface HandView {
    id: number;
    pose: Pose;
    selected_subgoal: number | null;
    attached_component: number | null;
    energy: number | null;
}

export interface ComponentView {
    id: number;
    pose: Pose;
    goal_pose: Pose;
    goal_loss: number;
    at_goal: boolean;
}

export interface BoxWorkspace {
    kind: "box";
    lo: [number, number, number];
    hi: [number, number, number];
}

export interface HalfspaceWorkspace {
    kind: "halfspace";
    normal: [number, number, number];
    offset: number;
}

export type Workspace = BoxWorkspace | HalfspaceWorkspace;

export type SimStatus = "running" | "paused" | "converged";

export interface Snapshot {
    step: number;
    sim_status: SimStatus;
    hands: HandView[];
    components: ComponentView[];
    workspaces: Workspace[];
    table: { x: [number, number]; y: [number, number] };
    loss: { raw_total: number; normalized_total: number; initial_total: number };
}

export interface AckPayload {
    status: "accepted" | "rejected";
    reason?: string;
    for_seq: number | null;
}

export interface EventRecord {
    step: number;
    kind: string;
    hand: number | null;
    component: number | null;
}

export interface LogPayload extends AckPayload {
    records: EventRecord[];
}

export type ServerMessage =
    | { v: 1; type: "snapshot"; seq: number; payload: Snapshot }
    | { v: 1; type: "ack"; seq: number; payload: AckPayload }
    | { v: 1; type: "event_log"; seq: number; payload: LogPayload };

export type CommandType =
    | "move_component"
    | "pause"
    | "resume"
    | "single_step"
    | "reset"
    | "set_param"
    | "get_log";

export function encodeCommand(
    type: CommandType,
    seq: number,
    payload: Record<string, unknown> = {},
): string {
    return JSON.stringify({ v: PROTOCOL_VERSION, type, seq, payload });
}

export function decodeServerMessage(raw: string): ServerMessage | null {
    let doc: unknown;
    try {
        doc = JSON.parse(raw);
    } catch {
        return null;
    }
    if (typeof doc !== "object" || doc === null) return null;
    const msg = doc as Record<string, unknown>;
    if (msg.v !== PROTOCOL_VERSION) return null;
    if (msg.type !== "snapshot" && msg.type !== "ack" && msg.type !== "event_log") {
        return null;
    }
    if (typeof msg.seq !== "number" || typeof msg.payload !== "object") {
        return null;
    }
    return msg as unknown as ServerMessage;
}
