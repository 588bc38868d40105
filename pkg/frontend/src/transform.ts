// Table <-> canvas coordinate mapping. The table's +x goes right and +y
// goes up on screen; the canvas keeps a fixed margin around the table.

export interface Viewport {
    width: number;
    height: number;
    tableX: [number, number];
    tableY: [number, number];
    margin: number;
}

export function scaleOf(vp: Viewport): number {
    const spanX = vp.tableX[1] - vp.tableX[0];
    const spanY = vp.tableY[1] - vp.tableY[0];
    return Math.min(
        (vp.width - 2 * vp.margin) / spanX,
        (vp.height - 2 * vp.margin) / spanY,
    );
}

export function tableToScreen(
    vp: Viewport,
    x: number,
    y: number,
): [number, number] {
    const s = scaleOf(vp);
    const cx = (vp.tableX[0] + vp.tableX[1]) / 2;
    const cy = (vp.tableY[0] + vp.tableY[1]) / 2;
    return [vp.width / 2 + (x - cx) * s, vp.height / 2 - (y - cy) * s];
}

export function screenToTable(
    vp: Viewport,
    px: number,
    py: number,
): [number, number] {
    const s = scaleOf(vp);
    const cx = (vp.tableX[0] + vp.tableX[1]) / 2;
    const cy = (vp.tableY[0] + vp.tableY[1]) / 2;
    return [cx + (px - vp.width / 2) / s, cy - (py - vp.height / 2) / s];
}
