/** Client state: one session, one role view, one active course and tab.
 * Nothing outlives the tab beyond the session token. */

import { ApiClient, type MatrixDoc, type UserDoc } from "./api.js";
import { Gate } from "./authz.js";
import type { TabId } from "./i18n.js";

const TOKEN_KEY = "knet.token";

export class ViewState {
  api: ApiClient;
  user: UserDoc | null = null;
  matrix: MatrixDoc | null = null;
  activeCourse: string | null = null;
  activeTab: TabId = "anasayfa";

  constructor(base = "") {
    this.api = new ApiClient(base);
    const stored = sessionStorage.getItem(TOKEN_KEY);
    if (stored) this.api.token = stored;
  }

  get gate(): Gate {
    return new Gate(
      this.matrix ?? { roles: [], actions: {} },
      new Set(this.user?.roles ?? []),
    );
  }

  get signedIn(): boolean {
    return this.api.token !== null && this.user !== null;
  }

  async signIn(displayName: string, password: string): Promise<void> {
    const session = await this.api.login(displayName, password);
    sessionStorage.setItem(TOKEN_KEY, session.token);
    this.user = session.user;
    this.matrix = await this.api.authorizationMatrix();
  }

  /** Restore a stored token; false when it is missing or stale. */
  async resume(): Promise<boolean> {
    if (!this.api.token) return false;
    try {
      this.user = await this.api.me();
      this.matrix = await this.api.authorizationMatrix();
      return true;
    } catch {
      this.api.token = null;
      sessionStorage.removeItem(TOKEN_KEY);
      return false;
    }
  }

  async signOut(): Promise<void> {
    try {
      await this.api.logout();
    } finally {
      sessionStorage.removeItem(TOKEN_KEY);
      this.user = null;
      this.matrix = null;
    }
  }

  async refreshUser(): Promise<void> {
    if (this.api.token) this.user = await this.api.me();
  }
}
