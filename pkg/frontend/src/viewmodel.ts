// Double-buffered view state: the renderer reads only the latest
// snapshot; every displayed quantity originates from a snapshot field.
// Drag handling emits exactly one move_component per completed drag.

import { Pose, Snapshot } from "./protocol.js";

export const DRAG_DEAD_BAND_M = 0.001; // 1 mm: smaller drags are no-ops
export const SPARKLINE_CAPACITY = 600;

export interface PendingMove {
    componentId: number;
    pose: Pose;
    seq: number | null; // null until the command has been sent
}

export interface DragState {
    componentId: number;
    startTable: [number, number];
    currentTable: [number, number];
}

export class ViewModel {
    latest: Snapshot | null = null;
    lastSeq = -1;
    connection: "connecting" | "connected" | "reconnecting" = "connecting";
    drag: DragState | null = null;
    pending: PendingMove | null = null;
    toast: string | null = null;
    sparkline: number[] = [];

    /** Adopt a snapshot unless an already-rendered frame is newer. */
    acceptSnapshot(snapshot: Snapshot, seq: number): boolean {
        if (seq <= this.lastSeq) return false; // stale frame: discard
        this.lastSeq = seq;
        this.latest = snapshot;
        this.sparkline.push(snapshot.loss.normalized_total);
        if (this.sparkline.length > SPARKLINE_CAPACITY) {
            this.sparkline.splice(0, this.sparkline.length - SPARKLINE_CAPACITY);
        }
        if (this.pending !== null && this.pending.seq === null) {
            // not yet sent: keep the ghost
            return true;
        }
        return true;
    }

    /** Begin dragging a component at a table-space point. */
    beginDrag(componentId: number, table: [number, number]) {
        this.drag = { componentId, startTable: table, currentTable: table };
    }

    moveDrag(table: [number, number]) {
        if (this.drag !== null) this.drag.currentTable = table;
    }

    /**
     * Finish the drag. Returns the move payload to emit, or null when the
     * total displacement is inside the dead band (no-op drag suppressed).
     */
    endDrag(): { id: number; pose: Pose } | null {
        const drag = this.drag;
        if (drag === null || this.latest === null) return null;
        this.drag = null;
        const dx = drag.currentTable[0] - drag.startTable[0];
        const dy = drag.currentTable[1] - drag.startTable[1];
        if (Math.hypot(dx, dy) < DRAG_DEAD_BAND_M) return null;
        const comp = this.latest.components[drag.componentId];
        const pose: Pose = {
            p: [
                comp.pose.p[0] + dx,
                comp.pose.p[1] + dy,
                comp.pose.p[2],
            ],
            r: [...comp.pose.r] as [number, number, number],
        };
        this.pending = { componentId: drag.componentId, pose, seq: null };
        return { id: drag.componentId, pose };
    }

    markPendingSent(seq: number) {
        if (this.pending !== null) this.pending.seq = seq;
    }

    /** Resolve the ghost when its command is acknowledged. */
    resolveAck(forSeq: number | null, status: string, reason?: string) {
        if (this.pending === null || this.pending.seq !== forSeq) return;
        if (status === "rejected") {
            this.toast = `move rejected: ${reason ?? "unknown"}`;
        }
        this.pending = null; // accepted moves show up in the next snapshot
    }

    clearToast() {
        this.toast = null;
    }
}
