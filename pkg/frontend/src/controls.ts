/**
 * Slider/toggle model with server-echoed truth.
 *
 * A control change sends a config delta and goes "pending" until the
 * server echoes the full config back; the echo is what the UI renders. If
 * the server answers with an error instead, the pending value is reverted
 * to the last echo and the message surfaces inline.
 */

import { SessionConfigDto } from "./protocol.js";

export type ConfigKey = keyof SessionConfigDto;

export class ControlPanel {
  private echo: SessionConfigDto | null = null;
  private pending = new Map<ConfigKey, unknown>();

  constructor(private readonly send: (delta: Partial<SessionConfigDto>) => void) {}

  /** Value to render for a control: pending change if any, else the echo. */
  value<K extends ConfigKey>(key: K): SessionConfigDto[K] | undefined {
    if (this.pending.has(key)) {
      return this.pending.get(key) as SessionConfigDto[K];
    }
    return this.echo?.[key];
  }

  propose<K extends ConfigKey>(key: K, value: SessionConfigDto[K]): void {
    this.pending.set(key, value);
    this.send({ [key]: value } as Partial<SessionConfigDto>);
  }

  /** Server accepted: the echo becomes the truth and pendings resolve. */
  applyEcho(config: SessionConfigDto): void {
    this.echo = config;
    this.pending.clear();
  }

  /** Server rejected something: drop pendings, fall back to the echo. */
  revertPending(): void {
    this.pending.clear();
  }

  get hasEcho(): boolean {
    return this.echo !== null;
  }
}
