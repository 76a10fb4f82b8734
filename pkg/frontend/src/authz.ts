/** Role-gated rendering. The matrix comes from the server's own action
 * catalog (`GET /api/meta/authorization`), so what the UI offers is by
 * construction what the API allows — the client adds no rules of its own. */

import type { MatrixDoc } from "./api.js";

export const ANY = "any";

export class Gate {
  constructor(
    private readonly matrix: MatrixDoc,
    private readonly roles: ReadonlySet<string>,
  ) {}

  /** May the current user perform `action`? Unknown actions are denied —
   * the catalog is closed. */
  can(action: string): boolean {
    const granted = this.matrix.actions[action];
    if (!granted) return false;
    if (granted.includes(ANY)) return true;
    return granted.some((role) => this.roles.has(role));
  }

  has(role: string): boolean {
    return this.roles.has(role);
  }
}
