// Console entry point: connects to the bridge named in the ?server=
// query parameter, renders the scene on each snapshot, and turns mouse
// drags on beams into single move_component commands on release.

import { BridgeConnection } from "./connection.js";
import { renderScene } from "./render.js";
import { Viewport, screenToTable } from "./transform.js";
import { ViewModel } from "./viewmodel.js";

const params = new URLSearchParams(window.location.search);
const serverUrl = params.get("server") ?? "ws://127.0.0.1:8765";

const canvas = document.getElementById("scene") as HTMLCanvasElement;
const ctx = canvas.getContext("2d")!;
const statusEl = document.getElementById("status")!;
const detailEl = document.getElementById("detail")!;

const vm = new ViewModel();
let viewport: Viewport = {
    width: canvas.width,
    height: canvas.height,
    tableX: [-0.5, 0.5],
    tableY: [-0.5, 0.5],
    margin: 30,
};

function repaint() {
    renderScene(ctx, viewport, vm);
    statusEl.textContent = vm.connection;
    const snap = vm.latest;
    if (snap !== null) {
        detailEl.textContent = snap.hands
            .map((h) => {
                const sel = h.selected_subgoal === null ? "idle" :
                    `beam ${h.selected_subgoal}` +
                    (h.attached_component === h.selected_subgoal ? " (held)" : "") +
                    (h.energy !== null ? ` e=${h.energy.toFixed(3)}` : "");
                return `hand ${h.id}: ${sel}`;
            })
            .join("   |   ");
    }
}

const connection = new BridgeConnection(serverUrl, {
    onSnapshot: (snapshot, seq) => {
        if (vm.acceptSnapshot(snapshot, seq)) {
            viewport = { ...viewport, tableX: snapshot.table.x, tableY: snapshot.table.y };
            repaint();
        }
    },
    onAck: (ack) => {
        vm.resolveAck(ack.for_seq, ack.status, ack.reason);
        if (vm.toast !== null) {
            setTimeout(() => { vm.clearToast(); repaint(); }, 3000);
        }
        repaint();
    },
    onLog: (log) => {
        const blob = new Blob(
            [log.records.map((r) => JSON.stringify(r)).join("\n") + "\n"],
            { type: "application/jsonl" });
        const a = document.createElement("a");
        a.href = URL.createObjectURL(blob);
        a.download = "events.jsonl";
        a.click();
        URL.revokeObjectURL(a.href);
    },
    onStatus: (status) => {
        vm.connection = status;
        repaint();
    },
});

function tablePoint(ev: MouseEvent): [number, number] {
    const rect = canvas.getBoundingClientRect();
    return screenToTable(viewport, ev.clientX - rect.left, ev.clientY - rect.top);
}

canvas.addEventListener("mousedown", (ev) => {
    const snap = vm.latest;
    if (snap === null) return;
    const [x, y] = tablePoint(ev);
    let nearest = -1;
    let best = 0.05; // grab radius in metres
    for (const comp of snap.components) {
        const d = Math.hypot(comp.pose.p[0] - x, comp.pose.p[1] - y);
        if (d < best) {
            best = d;
            nearest = comp.id;
        }
    }
    if (nearest >= 0) {
        vm.beginDrag(nearest, [x, y]);
        repaint();
    }
});

canvas.addEventListener("mousemove", (ev) => {
    if (vm.drag !== null) {
        vm.moveDrag(tablePoint(ev));
        repaint();
    }
});

window.addEventListener("mouseup", () => {
    const move = vm.endDrag();
    if (move !== null) {
        const seq = connection.send("move_component", move);
        vm.markPendingSent(seq);
    }
    repaint();
});

function bind(id: string, type: "pause" | "resume" | "single_step" | "get_log") {
    document.getElementById(id)!.addEventListener("click", () => {
        connection.send(type);
    });
}

bind("pause", "pause");
bind("resume", "resume");
bind("step", "single_step");
bind("download-log", "get_log");

document.getElementById("reset")!.addEventListener("click", () => {
    const seedInput = document.getElementById("seed") as HTMLInputElement;
    connection.send("reset", { seed: Number(seedInput.value) || 0 });
});

document.getElementById("apply-ts")!.addEventListener("click", () => {
    const input = document.getElementById("ts") as HTMLInputElement;
    connection.send("set_param", { name: "t_s", value: Number(input.value) });
});

repaint();
