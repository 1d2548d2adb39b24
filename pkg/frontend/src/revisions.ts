/** Stale-response guard: every edit bumps the revision, every request
 * carries it, and a response is applied only while its revision is still
 * the current one.  Anything older is counted and dropped. */

export class RevisionGate {
  private current = 0;
  discarded = 0;
  applied = 0;

  get revision(): number {
    return this.current;
  }

  bump(): number {
    this.current += 1;
    return this.current;
  }

  /** Apply a response effect iff it belongs to the current revision. */
  accept(revision: unknown, apply: () => void): boolean {
    if (typeof revision === "number" && revision === this.current) {
      apply();
      this.applied += 1;
      return true;
    }
    this.discarded += 1;
    return false;
  }
}
