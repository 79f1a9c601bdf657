/**
 * Pad session client: wires a byte transport to the message schema and
 * the view-state store.
 *
 * Transports only move lines of text. TcpTransport (node) talks straight
 * to `velopad serve`; browsers use WebSocketTransport through a
 * websocket-to-TCP bridge since pages cannot open raw sockets.
 */

import {
  ClientMessage,
  encodeMessage,
  LineSplitter,
  parseServerMessage,
  SessionConfigDto,
  StrokeEventDto,
} from "./protocol.js";
import { StageStore } from "./stages.js";

export interface Transport {
  send(line: string): void;
  onLine(handler: (line: string) => void): void;
  onClose(handler: () => void): void;
  close(): void;
}

export class PadClient {
  readonly store = new StageStore();

  constructor(private readonly transport: Transport) {
    transport.onLine((line) => this.handleLine(line));
    transport.onClose(() => this.store.setConnected(false));
    this.store.setConnected(true);
  }

  private handleLine(line: string): void {
    let msg;
    try {
      msg = parseServerMessage(line);
    } catch (err) {
      this.store.applyError(String(err));
      return;
    }
    switch (msg.type) {
      case "config":
        this.store.applyConfig(msg.payload);
        break;
      case "frame":
        this.store.applyFrame(msg.payload);
        break;
      case "report":
        this.store.applyReport(msg.payload);
        break;
      case "error":
        this.store.applyError(msg.payload.message);
        break;
    }
  }

  private send(msg: ClientMessage): void {
    this.transport.send(encodeMessage(msg));
  }

  sendStrokes(events: StrokeEventDto[]): void {
    if (events.length > 0) {
      this.send({ type: "stroke", payload: { events } });
    }
  }

  clear(): void {
    this.send({ type: "clear", payload: {} });
  }

  setConfig(delta: Partial<SessionConfigDto>): void {
    this.send({ type: "config", payload: delta });
  }

  close(): void {
    this.transport.close();
  }
}

/** Raw TCP transport for node (tests, terminal demo). */
export async function connectTcp(host: string, port: number): Promise<Transport> {
  const net = await import("node:net");
  const splitter = new LineSplitter();
  let lineHandler: (line: string) => void = () => {};
  let closeHandler: () => void = () => {};

  const socket: import("node:net").Socket = await new Promise((resolve, reject) => {
    const s = net.createConnection({ host, port }, () => resolve(s));
    s.once("error", reject);
  });
  socket.setEncoding("utf-8");
  socket.on("data", (chunk: string) => {
    for (const line of splitter.push(chunk)) {
      lineHandler(line);
    }
  });
  socket.on("close", () => closeHandler());

  return {
    send: (line) => void socket.write(line),
    onLine: (handler) => {
      lineHandler = handler;
    },
    onClose: (handler) => {
      closeHandler = handler;
    },
    close: () => socket.destroy(),
  };
}

/** Browser transport via a websocket-to-TCP bridge in front of the service. */
export function connectWebSocket(url: string): Transport {
  const splitter = new LineSplitter();
  let lineHandler: (line: string) => void = () => {};
  let closeHandler: () => void = () => {};
  const ws = new WebSocket(url);
  ws.onmessage = (event) => {
    for (const line of splitter.push(String(event.data))) {
      lineHandler(line);
    }
  };
  ws.onclose = () => closeHandler();
  return {
    send: (line) => ws.send(line),
    onLine: (handler) => {
      lineHandler = handler;
    },
    onClose: (handler) => {
      closeHandler = handler;
    },
    close: () => ws.close(),
  };
}
