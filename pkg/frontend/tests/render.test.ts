import { describe, expect, it } from "vitest";

import { Canvas2D, renderScene } from "../src/render.js";
import { Snapshot } from "../src/protocol.js";
import { Viewport } from "../src/transform.js";
import { ViewModel } from "../src/viewmodel.js";

class RecordingContext implements Canvas2D {
    calls: string[] = [];
    texts: string[] = [];
    strokeStyle = "";
    fillStyle = "";
    lineWidth = 1;
    font = "";
    globalAlpha = 1;
    clearRect() { this.calls.push("clearRect"); }
    beginPath() { this.calls.push("beginPath"); }
    moveTo() { this.calls.push("moveTo"); }
    lineTo() { this.calls.push("lineTo"); }
    arc() { this.calls.push("arc"); }
    rect() { this.calls.push("rect"); }
    stroke() { this.calls.push("stroke"); }
    fill() { this.calls.push("fill"); }
    save() { this.calls.push("save"); }
    restore() { this.calls.push("restore"); }
    translate() { this.calls.push("translate"); }
    rotate() { this.calls.push("rotate"); }
    setLineDash() { this.calls.push("setLineDash"); }
    fillText(text: string) { this.texts.push(text); }
}

const vp: Viewport = {
    width: 800, height: 600, tableX: [-0.5, 0.5], tableY: [-0.5, 0.5], margin: 30,
};

function converged(): Snapshot {
    return {
        step: 99,
        sim_status: "converged",
        hands: [
            { id: 0, pose: { p: [0.3, -0.2, 0.05], r: [0, 0, 0] },
              selected_subgoal: null, attached_component: null, energy: null },
            { id: 1, pose: { p: [0.3, 0.2, 0.05], r: [0, 0, 0] },
              selected_subgoal: 1, attached_component: 1, energy: 0.12 },
        ],
        components: [
            { id: 0, pose: { p: [-0.15, -0.2, 0], r: [0, 0, 0] },
              goal_pose: { p: [-0.15, -0.2, 0], r: [0, 0, 0] },
              goal_loss: 0.0, at_goal: true },
            { id: 1, pose: { p: [0.1, 0.2, 0], r: [0, 0, 1.0] },
              goal_pose: { p: [0.03, 0.2, 0], r: [0, 0, 1.57] },
              goal_loss: 0.2, at_goal: false },
        ],
        workspaces: [
            { kind: "box", lo: [-0.5, -0.5, -0.1], hi: [0.5, 0.025, 0.3] },
            { kind: "halfspace", normal: [0, -1, 0], offset: 0.025 },
        ],
        table: { x: [-0.5, 0.5], y: [-0.5, 0.5] },
        loss: { raw_total: 0.2, normalized_total: 0.04, initial_total: 5.0 },
    };
}

describe("renderScene", () => {
    it("shows the connection state before any snapshot arrives", () => {
        const ctx = new RecordingContext();
        const vm = new ViewModel();
        renderScene(ctx, vp, vm);
        expect(ctx.texts.join(" ")).toContain("connecting");
    });

    it("draws beams, goals, one arrow per targeting hand, and the status line", () => {
        const ctx = new RecordingContext();
        const vm = new ViewModel();
        vm.connection = "connected";
        vm.acceptSnapshot(converged(), 1);
        renderScene(ctx, vp, vm);
        // hand 0 idles (no arrow), hand 1 targets beam 1 (one arrow): the
        // line pairs are the workspace boundary, sparkline segments, arrow
        expect(ctx.calls.filter((c) => c === "arc").length).toBe(2); // two hands
        expect(ctx.texts.join(" ")).toContain("step 99");
        expect(ctx.texts.join(" ")).toContain("converged");
        // per-component goal_loss labels rendered
        expect(ctx.texts.some((t) => t.startsWith("0:"))).toBe(true);
        expect(ctx.texts.some((t) => t.startsWith("1:"))).toBe(true);
    });

    it("renders every displayed quantity from the snapshot only", () => {
        const ctx = new RecordingContext();
        const vm = new ViewModel();
        vm.connection = "connected";
        const snap = converged();
        vm.acceptSnapshot(snap, 1);
        renderScene(ctx, vp, vm);
        const statusLine = ctx.texts.find((t) => t.includes("loss"));
        expect(statusLine).toContain(snap.loss.normalized_total.toFixed(4));
    });
});
