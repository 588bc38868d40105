// Top-down 2D scene rendering. Everything drawn comes from the latest
// snapshot; the renderer holds no simulation state of its own. The
// context parameter is the structural subset of CanvasRenderingContext2D
// the renderer uses, which keeps it testable with a recording stub.

import { Snapshot, Workspace } from "./protocol.js";
import { Viewport, tableToScreen, scaleOf } from "./transform.js";
import { ViewModel } from "./viewmodel.js";

export const BEAM_LENGTH_M = 0.3;
export const BEAM_WIDTH_M = 0.04;

export interface Canvas2D {
    clearRect(x: number, y: number, w: number, h: number): void;
    beginPath(): void;
    moveTo(x: number, y: number): void;
    lineTo(x: number, y: number): void;
    arc(x: number, y: number, r: number, a0: number, a1: number): void;
    rect(x: number, y: number, w: number, h: number): void;
    stroke(): void;
    fill(): void;
    save(): void;
    restore(): void;
    translate(x: number, y: number): void;
    rotate(rad: number): void;
    fillText(text: string, x: number, y: number): void;
    setLineDash(segments: number[]): void;
    strokeStyle: string | object;
    fillStyle: string | object;
    lineWidth: number;
    font: string;
    globalAlpha: number;
}

function drawBeam(
    ctx: Canvas2D,
    vp: Viewport,
    x: number,
    y: number,
    yaw: number,
    fill: string | null,
    stroke: string,
    alpha = 1.0,
) {
    const [px, py] = tableToScreen(vp, x, y);
    const s = scaleOf(vp);
    ctx.save();
    ctx.globalAlpha = alpha;
    ctx.translate(px, py);
    ctx.rotate(-yaw); // screen y is flipped
    ctx.beginPath();
    ctx.rect(
        (-BEAM_LENGTH_M / 2) * s,
        (-BEAM_WIDTH_M / 2) * s,
        BEAM_LENGTH_M * s,
        BEAM_WIDTH_M * s,
    );
    if (fill !== null) {
        ctx.fillStyle = fill;
        ctx.fill();
    }
    ctx.strokeStyle = stroke;
    ctx.stroke();
    ctx.restore();
}

function drawWorkspace(ctx: Canvas2D, vp: Viewport, ws: Workspace, color: string) {
    ctx.save();
    ctx.strokeStyle = color;
    ctx.setLineDash([6, 4]);
    if (ws.kind === "box") {
        const [x0, y0] = tableToScreen(vp, ws.lo[0], ws.hi[1]);
        const [x1, y1] = tableToScreen(vp, ws.hi[0], ws.lo[1]);
        ctx.beginPath();
        ctx.rect(x0, y0, x1 - x0, y1 - y0);
        ctx.stroke();
    } else {
        // draw the boundary line normal.p = offset across the table
        const [nx, ny] = [ws.normal[0], ws.normal[1]];
        if (Math.abs(ny) > 1e-9) {
            const yAt = (x: number) => (ws.offset - nx * x) / ny;
            const [x0, y0] = tableToScreen(vp, vp.tableX[0], yAt(vp.tableX[0]));
            const [x1, y1] = tableToScreen(vp, vp.tableX[1], yAt(vp.tableX[1]));
            ctx.beginPath();
            ctx.moveTo(x0, y0);
            ctx.lineTo(x1, y1);
            ctx.stroke();
        }
    }
    ctx.setLineDash([]);
    ctx.restore();
}

function drawSparkline(ctx: Canvas2D, vm: ViewModel, width: number) {
    const h = 48;
    const points = vm.sparkline;
    ctx.save();
    ctx.strokeStyle = "#888";
    ctx.beginPath();
    ctx.moveTo(0, h + 0.5);
    ctx.lineTo(width, h + 0.5);
    ctx.stroke();
    // convergence threshold marker at 0.05
    const yThresh = h - Math.min(0.05, 1.2) * (h / 1.2);
    ctx.strokeStyle = "#c33";
    ctx.setLineDash([3, 3]);
    ctx.beginPath();
    ctx.moveTo(0, yThresh);
    ctx.lineTo(width, yThresh);
    ctx.stroke();
    ctx.setLineDash([]);
    if (points.length > 1) {
        ctx.strokeStyle = "#06c";
        ctx.beginPath();
        points.forEach((v, i) => {
            const x = (i / (points.length - 1)) * width;
            const y = h - Math.min(v, 1.2) * (h / 1.2);
            if (i === 0) ctx.moveTo(x, y);
            else ctx.lineTo(x, y);
        });
        ctx.stroke();
    }
    ctx.restore();
}

const HAND_COLORS = ["#d95f02", "#7570b3"];

export function renderScene(
    ctx: Canvas2D,
    vp: Viewport,
    vm: ViewModel,
): void {
    ctx.clearRect(0, 0, vp.width, vp.height);
    const snap: Snapshot | null = vm.latest;
    if (snap === null) {
        ctx.fillStyle = "#666";
        ctx.font = "14px sans-serif";
        ctx.fillText(`(${vm.connection})`, 12, 24);
        return;
    }

    // table outline
    ctx.strokeStyle = "#444";
    const [tx0, ty0] = tableToScreen(vp, vp.tableX[0], vp.tableY[1]);
    const [tx1, ty1] = tableToScreen(vp, vp.tableX[1], vp.tableY[0]);
    ctx.beginPath();
    ctx.rect(tx0, ty0, tx1 - tx0, ty1 - ty0);
    ctx.stroke();

    snap.workspaces.forEach((ws, i) =>
        drawWorkspace(ctx, vp, ws, HAND_COLORS[i % HAND_COLORS.length]));

    // goals as outlines, components as solid beams
    for (const comp of snap.components) {
        drawBeam(ctx, vp, comp.goal_pose.p[0], comp.goal_pose.p[1],
            comp.goal_pose.r[2], null, "#aaa", 0.9);
        const dragged = vm.drag?.componentId === comp.id;
        const fill = comp.at_goal ? "#8c8" : dragged ? "#fc6" : "#69c";
        drawBeam(ctx, vp, comp.pose.p[0], comp.pose.p[1], comp.pose.r[2],
            fill, "#235");
        const [lx, ly] = tableToScreen(vp, comp.pose.p[0], comp.pose.p[1]);
        ctx.fillStyle = "#123";
        ctx.font = "11px sans-serif";
        ctx.fillText(`${comp.id}: ${comp.goal_loss.toExponential(1)}`,
            lx + 8, ly - 8);
    }

    // pending-move ghost until the bridge acknowledges
    if (vm.pending !== null) {
        drawBeam(ctx, vp, vm.pending.pose.p[0], vm.pending.pose.p[1],
            vm.pending.pose.r[2], null, "#f80", 0.7);
    }

    // hands with arrows to their selected sub-goals
    snap.hands.forEach((hand, i) => {
        const color = HAND_COLORS[i % HAND_COLORS.length];
        const [hx, hy] = tableToScreen(vp, hand.pose.p[0], hand.pose.p[1]);
        ctx.beginPath();
        ctx.arc(hx, hy, 7, 0, 2 * Math.PI);
        ctx.fillStyle = color;
        ctx.fill();
        if (hand.selected_subgoal !== null) {
            const target = snap.components[hand.selected_subgoal];
            const [cx, cy] = tableToScreen(vp, target.pose.p[0], target.pose.p[1]);
            ctx.strokeStyle = color;
            ctx.beginPath();
            ctx.moveTo(hx, hy);
            ctx.lineTo(cx, cy);
            ctx.stroke();
        }
    });

    drawSparkline(ctx, vm, vp.width);

    // status line: every quantity comes from the snapshot
    ctx.fillStyle = "#123";
    ctx.font = "13px sans-serif";
    const loss = snap.loss.normalized_total;
    ctx.fillText(
        `step ${snap.step}  ${snap.sim_status}  loss ${loss.toFixed(4)}  (${vm.connection})`,
        12, vp.height - 10);
    if (vm.toast !== null) {
        ctx.fillStyle = "#c33";
        ctx.fillText(vm.toast, 12, vp.height - 28);
    }
}
