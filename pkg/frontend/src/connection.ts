// WebSocket session with reconnect-on-drop and per-command callbacks.
// The WebSocket constructor is injectable so tests can run under node.

import {
    AckPayload,
    LogPayload,
    ServerMessage,
    Snapshot,
    CommandType,
    decodeServerMessage,
    encodeCommand,
} from "./protocol.js";

export type ConnectionStatus = "connecting" | "connected" | "reconnecting";

export interface ConnectionEvents {
    onSnapshot: (snapshot: Snapshot, seq: number) => void;
    onAck?: (ack: AckPayload) => void;
    onLog?: (log: LogPayload) => void;
    onStatus?: (status: ConnectionStatus) => void;
}

interface WebSocketLike {
    send(data: string): void;
    close(): void;
    onopen: ((ev?: unknown) => void) | null;
    onclose: ((ev?: unknown) => void) | null;
    onerror: ((ev?: unknown) => void) | null;
    onmessage: ((ev: { data: unknown }) => void) | null;
}

type WebSocketCtor = new (url: string) => WebSocketLike;

const BACKOFF_INITIAL_MS = 250;
const BACKOFF_MAX_MS = 5000;

export class BridgeConnection {
    private ws: WebSocketLike | null = null;
    private seq = 0;
    private backoffMs = BACKOFF_INITIAL_MS;
    private closed = false;
    private reconnectTimer: ReturnType<typeof setTimeout> | null = null;
    status: ConnectionStatus = "connecting";

    constructor(
        private readonly url: string,
        private readonly events: ConnectionEvents,
        private readonly wsCtor: WebSocketCtor =
            (globalThis as { WebSocket?: WebSocketCtor }).WebSocket!,
    ) {
        if (!this.wsCtor) {
            throw new Error("no WebSocket implementation available");
        }
        this.open();
    }

    private setStatus(status: ConnectionStatus) {
        this.status = status;
        this.events.onStatus?.(status);
    }

    private open() {
        if (this.closed) return;
        const ws = new this.wsCtor(this.url);
        this.ws = ws;
        ws.onopen = () => {
            this.backoffMs = BACKOFF_INITIAL_MS;
            this.setStatus("connected");
        };
        ws.onmessage = (ev) => this.dispatch(String(ev.data));
        ws.onerror = () => {
            /* onclose follows; reconnect happens there */
        };
        ws.onclose = () => {
            this.ws = null;
            if (this.closed) return;
            this.setStatus("reconnecting");
            this.reconnectTimer = setTimeout(() => this.open(), this.backoffMs);
            this.backoffMs = Math.min(this.backoffMs * 2, BACKOFF_MAX_MS);
        };
    }

    private dispatch(raw: string) {
        const msg: ServerMessage | null = decodeServerMessage(raw);
        if (msg === null) return;
        if (msg.type === "snapshot") {
            this.events.onSnapshot(msg.payload, msg.seq);
        } else if (msg.type === "ack") {
            this.events.onAck?.(msg.payload);
        } else {
            this.events.onLog?.(msg.payload as LogPayload);
        }
    }

    /** Send a command; returns its seq so acks can be correlated. */
    send(type: CommandType, payload: Record<string, unknown> = {}): number {
        const seq = ++this.seq;
        if (this.ws === null || this.status !== "connected") {
            throw new Error("not connected");
        }
        this.ws.send(encodeCommand(type, seq, payload));
        return seq;
    }

    close() {
        this.closed = true;
        if (this.reconnectTimer !== null) clearTimeout(this.reconnectTimer);
        this.ws?.close();
        this.ws = null;
    }
}
