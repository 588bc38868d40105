import { describe, expect, it } from "vitest";

import { screenToTable, tableToScreen, Viewport } from "../src/transform.js";

const vp: Viewport = {
    width: 800,
    height: 600,
    tableX: [-0.5, 0.5],
    tableY: [-0.5, 0.5],
    margin: 30,
};

describe("coordinate mapping", () => {
    it("maps the table centre to the canvas centre", () => {
        expect(tableToScreen(vp, 0, 0)).toEqual([400, 300]);
    });

    it("is inverse of itself", () => {
        for (const [x, y] of [[0.3, -0.2], [-0.5, 0.5], [0.12, 0.34]]) {
            const [px, py] = tableToScreen(vp, x, y);
            const [bx, by] = screenToTable(vp, px, py);
            expect(bx).toBeCloseTo(x, 10);
            expect(by).toBeCloseTo(y, 10);
        }
    });

    it("keeps +y pointing up on screen", () => {
        const [, pyLow] = tableToScreen(vp, 0, -0.4);
        const [, pyHigh] = tableToScreen(vp, 0, 0.4);
        expect(pyHigh).toBeLessThan(pyLow);
    });
});
