/**
 * Slider/toggle model with server-echoed truth.
 *
 * A control change sends a config delta and goes "pending" until the
 * server echoes the full config back; the echo is what the UI renders. If
 * the server answers with an error instead, the pending value is reverted
 * to the last echo and the message surfaces inline.
 */
export class ControlPanel {
    send;
    echo = null;
    pending = new Map();
    constructor(send) {
        this.send = send;
    }
    /** Value to render for a control: pending change if any, else the echo. */
    value(key) {
        if (this.pending.has(key)) {
            return this.pending.get(key);
        }
        return this.echo?.[key];
    }
    propose(key, value) {
        this.pending.set(key, value);
        this.send({ [key]: value });
    }
    /** Server accepted: the echo becomes the truth and pendings resolve. */
    applyEcho(config) {
        this.echo = config;
        this.pending.clear();
    }
    /** Server rejected something: drop pendings, fall back to the echo. */
    revertPending() {
        this.pending.clear();
    }
    get hasEcho() {
        return this.echo !== null;
    }
}
//# sourceMappingURL=controls.js.map