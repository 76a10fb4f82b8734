/** Portfolio: a member's graded work, grouped by course. */

import { ApiError, type PortfolioEntry } from "../api.js";
import { clear, el, notice } from "../dom.js";
import { t } from "../i18n.js";
import type { ViewState } from "../state.js";

export async function renderPortfolio(
  root: HTMLElement,
  state: ViewState,
  userId: string,
): Promise<void> {
  clear(root);
  let entries: PortfolioEntry[];
  let ownerName = userId;
  try {
    const [portfolio, profile] = await Promise.all([
      state.api.portfolio(userId),
      state.api.user(userId),
    ]);
    entries = portfolio;
    ownerName = profile.display_name;
  } catch (error) {
    if (error instanceof ApiError) {
      root.append(notice("error", `${error.code}: ${error.message}`));
      return;
    }
    throw error;
  }

  root.append(el("h2", {}, `${t("portfolio.title")} — ${ownerName}`));
  if (!entries.length) {
    root.append(el("p", {}, t("common.empty")));
    return;
  }

  const byCourse = new Map<string, PortfolioEntry[]>();
  for (const entry of entries) {
    const bucket = byCourse.get(entry.course_id) ?? [];
    bucket.push(entry);
    byCourse.set(entry.course_id, bucket);
  }

  for (const [, bucket] of byCourse) {
    const first = bucket[0]!;
    const section = el(
      "section",
      { class: "card portfolio-course" },
      el("h3", {}, `${first.course_title} (${first.term_id})`),
    );
    for (const entry of bucket) {
      const links = entry.final_attachments.map((attachment) =>
        el(
          "a",
          { href: `/api/attachments/${attachment.attachment_id}`, class: "attachment" },
          attachment.filename,
        ),
      );
      section.append(
        el(
          "p",
          { class: "portfolio-entry" },
          `${entry.assignment_title} — ${entry.teacher_grade} `,
          ...links,
        ),
      );
    }
    root.append(section);
  }
}
