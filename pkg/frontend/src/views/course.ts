/** The course module: one header, nine tabs, every control gated by the
 * authorization matrix and the server's own state machine. */

import {
  ApiError,
  type AssignmentDoc,
  type CourseDoc,
  type InvitationDoc,
  type RosterRow,
  type SubmissionDoc,
} from "../api.js";
import { formatDate } from "../dates.js";
import { clear, el, notice } from "../dom.js";
import { t, tabLabel, TABS, type TabId } from "../i18n.js";
import type { ViewState } from "../state.js";
import { label, showError } from "./login.js";
import { displayToIso } from "./profile.js";

export interface CourseActions {
  openPortfolio: (userId: string) => void;
}

export async function renderCourse(
  root: HTMLElement,
  state: ViewState,
  courseId: string,
  actions: CourseActions,
): Promise<void> {
  clear(root);
  state.activeCourse = courseId;
  let course: CourseDoc;
  try {
    course = await state.api.course(courseId);
  } catch (error) {
    if (error instanceof ApiError && (error.status === 403 || error.status === 404)) {
      root.append(
        el(
          "section",
          { class: "card access-denied" },
          el("h2", {}, t("course.access_denied")),
          notice("error", `${error.code}: ${error.message}`),
        ),
      );
      return;
    }
    throw error;
  }

  let roster: RosterRow[] = [];
  try {
    roster = await state.api.roster(courseId);
  } catch {
    // non-participants may browse the header; tabs degrade gracefully
  }
  const names = new Map<string, string>(roster.map((row) => [row.user_id, row.display_name]));
  names.set(course.teacher_id, course.teacher_name);
  const nameOf = (id: string) => names.get(id) ?? id;

  const header = el(
    "header",
    { class: "course-header" },
    el("h2", {}, course.title),
    el("p", {}, `${t("course.state")}: ${course.state} — ${course.teacher_name} — ${course.term_id}`),
  );

  const body = el("section", { class: "tab-body" });
  const status = el("div", { class: "status" });
  const refresh = () => renderCourse(root, state, courseId, actions);

  const tabBar = el("nav", { class: "tabs", role: "tablist" });
  for (const tab of TABS) {
    tabBar.append(
      el(
        "button",
        {
          type: "button",
          role: "tab",
          class: tab.id === state.activeTab ? "tab active" : "tab",
          "data-tab": tab.id,
          onclick: () => {
            state.activeTab = tab.id;
            for (const button of tabBar.querySelectorAll(".tab")) {
              button.classList.toggle("active", button.getAttribute("data-tab") === tab.id);
            }
            void showTab(tab.id);
          },
        },
        tabLabel(tab.id),
      ),
    );
  }

  async function showTab(tab: TabId): Promise<void> {
    clear(body);
    clear(status);
    try {
      switch (tab) {
        case "anasayfa":
          body.append(await homeTab(state, course, status, refresh));
          break;
        case "kilavuz":
          body.append(await guideTab(state, course, nameOf, status, refresh));
          break;
        case "duyurular":
          body.append(await announcementsTab(state, course, nameOf, status, refresh));
          break;
        case "odevler":
          body.append(await assignmentsTab(state, course, nameOf, status, refresh));
          break;
        case "tartismalar":
          body.append(await discussionsTab(state, course, nameOf, status, refresh));
          break;
        case "notlar":
          body.append(await gradesTab(state, course, nameOf, status));
          break;
        case "katilimcilar":
          body.append(participantsTab(roster));
          break;
        case "ders-programi":
          body.append(await scheduleTab(state, course));
          break;
        case "ogretmene-sor":
          body.append(await questionsTab(state, course, nameOf, status, refresh));
          break;
      }
    } catch (error) {
      showError(status, error);
    }
  }

  root.append(header, tabBar, body, status);
  await showTab(state.activeTab);
}

// -- Anasayfa -----------------------------------------------------------------

async function homeTab(
  state: ViewState,
  course: CourseDoc,
  status: HTMLElement,
  refresh: () => void,
): Promise<HTMLElement> {
  const gate = state.gate;
  const panel = el(
    "section",
    {},
    el(
      "div",
      { class: "badges" },
      el("span", { class: "badge" }, `${tabLabel("duyurular")} ${course.counts["announcements"] ?? 0}`),
      el("span", { class: "badge" }, `${tabLabel("katilimcilar")} ${course.counts["participants"] ?? 0}`),
    ),
    el(
      "dl",
      { class: "course-facts" },
      el("dt", {}, t("course.title")),
      el("dd", {}, course.title),
      el("dt", {}, t("course.content")),
      el("dd", {}, course.content || "—"),
      el("dt", {}, t("course.start")),
      el("dd", {}, formatDate(course.start_date)),
      el("dt", {}, t("course.end")),
      el("dd", {}, formatDate(course.end_date)),
    ),
  );

  const isNovice = state.user !== null && course.enrolled_novices.includes(state.user.user_id);
  if (
    gate.can("enroll") &&
    !isNovice &&
    (course.state === "enrolling" || course.state === "matching")
  ) {
    panel.append(
      actionButton(t("course.enroll"), status, async () => {
        await state.api.enroll(course.course_id);
        refresh();
      }),
    );
  }
  if (gate.can("open_enrollment") && course.state === "approved") {
    panel.append(
      actionButton(t("course.open_enrollment"), status, async () => {
        await state.api.openEnrollment(course.course_id);
        refresh();
      }),
    );
  }
  if (gate.can("close_course") && course.state === "active") {
    panel.append(
      actionButton(t("course.close"), status, async () => {
        await state.api.closeCourse(course.course_id);
        refresh();
      }),
    );
  }

  // course materials: the server enforces the all-matched read gate for
  // novices; a refusal surfaces inline rather than hiding the section
  const materialsPanel = el("section", {}, el("h3", {}, t("materials.title")));
  try {
    const materials = await state.api.materials(course.course_id);
    if (materials.length === 0) {
      materialsPanel.append(el("p", {}, t("common.empty")));
    }
    for (const material of materials) {
      materialsPanel.append(
        el(
          "p",
          { class: "material" },
          el(
            "a",
            { href: `/api/attachments/${material.attachment.attachment_id}` },
            material.attachment.filename,
          ),
          material.caption ? ` — ${material.caption}` : "",
        ),
      );
    }
  } catch (error) {
    if (error instanceof ApiError) {
      materialsPanel.append(notice("error", `${error.code}: ${error.message}`));
    } else {
      throw error;
    }
  }
  if (state.gate.can("publish_material")) {
    const file = el("input", { type: "file" });
    const caption = el("input", { name: "material_caption", placeholder: t("course.content") });
    materialsPanel.append(
      label(t("materials.publish"), file),
      caption,
      actionButton(t("materials.publish"), status, async () => {
        const chosen = file.files?.[0];
        if (!chosen) return;
        const bytes = new Uint8Array(await chosen.arrayBuffer());
        const uploaded = await state.api.uploadAttachment(chosen.name, chosen.type, bytes);
        await state.api.publishMaterial(course.course_id, uploaded, caption.value || undefined);
        refresh();
      }),
    );
  }
  panel.append(materialsPanel);
  return panel;
}

// -- Kılavuz -----------------------------------------------------------------

async function guideTab(
  state: ViewState,
  course: CourseDoc,
  nameOf: (id: string) => string,
  status: HTMLElement,
  refresh: () => void,
): Promise<HTMLElement> {
  const gate = state.gate;
  const user = state.user!;
  const panel = el("section", {});
  const inbox = await state.api.invitations(user.user_id);
  const mine = (invitations: InvitationDoc[]) =>
    invitations.filter((invitation) => invitation.course_id === course.course_id);

  const isNovice = course.enrolled_novices.includes(user.user_id);
  if (isNovice && gate.can("send_invitations")) {
    const sent = mine(inbox.sent);
    const matched = sent.find((invitation) => invitation.status === "superseded") ?? null;
    const selected = roster_guide(course, user.user_id, sent);
    if (selected) {
      panel.append(el("p", { class: "my-guide" }, `${t("guide.mine")}: ${nameOf(selected)}`));
    } else {
      const candidates = await state.api.guideCandidates(course.course_id);
      const pendingIds = new Set(
        sent.filter((i) => i.status === "pending").map((i) => i.guide_id),
      );
      const boxes: HTMLInputElement[] = [];
      const candidateList = el("div", { class: "candidates" });
      for (const candidate of candidates) {
        if (pendingIds.has(candidate.user_id)) continue;
        const box = el("input", {
          type: "checkbox",
          value: candidate.user_id,
          "data-name": candidate.display_name,
        });
        boxes.push(box);
        candidateList.append(el("label", { class: "candidate" }, box, candidate.display_name));
      }
      panel.append(
        el("h3", {}, t("guide.candidates")),
        candidateList,
        actionButton(t("guide.invite"), status, async () => {
          const chosen = boxes.filter((box) => box.checked).map((box) => box.value);
          if (!chosen.length) return;
          await state.api.sendInvitations(course.course_id, chosen);
          refresh();
        }),
      );

      const chips = el("div", { class: "chips" });
      for (const invitation of sent) {
        if (invitation.status === "pending") {
          chips.append(
            el("span", { class: "chip chip-pending" }, `${nameOf(invitation.guide_id)} — ${invitation.status}`),
          );
        } else if (invitation.status === "accepted" && gate.can("select_guide")) {
          chips.append(
            el(
              "span",
              { class: "chip chip-accepted" },
              `${nameOf(invitation.guide_id)} — ${invitation.status} `,
              actionButton(t("guide.select"), status, async () => {
                await state.api.selectGuide(course.course_id, invitation.invitation_id);
                refresh();
              }),
            ),
          );
        }
      }
      panel.append(el("h3", {}, t("guide.pending")), chips);
    }
    void matched;
  }

  if (gate.can("respond_invitation")) {
    const received = mine(inbox.received);
    const acceptedHere = received.filter((invitation) => invitation.status === "accepted").length;
    const atCapacity = acceptedHere >= 5;
    const list = el("div", { class: "invitations" });
    for (const invitation of received.filter((i) => i.status === "pending")) {
      const accept = actionButton(t("guide.accept"), status, async () => {
        await state.api.respondInvitation(invitation.invitation_id, true);
        refresh();
      });
      if (atCapacity) {
        accept.setAttribute("disabled", "disabled");
        accept.setAttribute("title", t("guide.full"));
      }
      list.append(
        el(
          "div",
          { class: "invitation-row" },
          el("span", {}, nameOf(invitation.novice_id)),
          accept,
          actionButton(t("guide.decline"), status, async () => {
            await state.api.respondInvitation(invitation.invitation_id, false);
            refresh();
          }),
        ),
      );
    }
    if (received.length) {
      panel.append(el("h3", {}, t("guide.incoming")), list);
      if (atCapacity) panel.append(el("p", { class: "capacity" }, t("guide.full")));
    }
  }

  if (!panel.childNodes.length) panel.append(el("p", {}, t("common.empty")));
  return panel;
}

function roster_guide(course: CourseDoc, noviceId: string, sent: InvitationDoc[]): string | null {
  // a selection supersedes the other invitations; the surviving accepted
  // one names the chosen guide
  void course;
  const superseded = sent.some((i) => i.status === "superseded");
  if (!superseded) return null;
  const accepted = sent.find((i) => i.status === "accepted");
  return accepted ? accepted.guide_id : null;
}

// -- Duyurular -----------------------------------------------------------------

async function announcementsTab(
  state: ViewState,
  course: CourseDoc,
  nameOf: (id: string) => string,
  status: HTMLElement,
  refresh: () => void,
): Promise<HTMLElement> {
  const panel = el("section", {});
  const announcements = await state.api.announcements(course.course_id);
  if (!announcements.length) panel.append(el("p", {}, t("common.empty")));
  for (const announcement of announcements) {
    panel.append(
      el(
        "article",
        { class: "announcement" },
        el("p", {}, announcement.body),
        el("footer", {}, nameOf(announcement.author_id)),
      ),
    );
  }
  if (state.gate.can("post_announcement")) {
    const body = el("textarea", { name: "announcement_body" });
    panel.append(
      el("h3", {}, t("announcements.post")),
      body,
      actionButton(t("common.send"), status, async () => {
        await state.api.postAnnouncement(course.course_id, body.value);
        refresh();
      }),
    );
  }
  return panel;
}

// -- Ödevler -----------------------------------------------------------------

async function assignmentsTab(
  state: ViewState,
  course: CourseDoc,
  nameOf: (id: string) => string,
  status: HTMLElement,
  refresh: () => void,
): Promise<HTMLElement> {
  const gate = state.gate;
  const panel = el("section", {});
  const assignments = await state.api.assignments(course.course_id);
  if (!assignments.length) panel.append(el("p", {}, t("common.empty")));

  for (const assignment of assignments) {
    const card = el(
      "article",
      { class: "assignment-card" },
      el("h3", {}, assignment.title),
      el(
        "p",
        { class: "assignment-dates" },
        `${t("assignment.start")}:${formatDate(assignment.start_date)} ` +
          `${t("assignment.deadline")}:${formatDate(assignment.deadline)}`,
      ),
    );
    if (gate.can("activate_assignment") && !assignment.active) {
      card.append(
        actionButton(t("assignment.activate"), status, async () => {
          await state.api.activateAssignment(assignment.assignment_id);
          refresh();
        }),
      );
    }
    if (assignment.active) {
      card.append(await submissionsPanel(state, assignment, nameOf, status, refresh));
    }
    panel.append(card);
  }

  if (gate.can("create_assignment")) {
    const title = el("input", { name: "assignment_title" });
    const start = el("input", { name: "assignment_start", placeholder: "GG-AA-YYYY" });
    const deadline = el("input", { name: "assignment_deadline", placeholder: "GG-AA-YYYY" });
    panel.append(
      el(
        "form",
        {
          class: "card",
          onsubmit: (event) => {
            event.preventDefault();
            void (async () => {
              try {
                await state.api.createAssignment(course.course_id, {
                  title: title.value,
                  start_date: displayToIso(start.value),
                  deadline: displayToIso(deadline.value),
                });
                refresh();
              } catch (error) {
                showError(status, error);
              }
            })();
          },
        },
        el("h3", {}, t("assignment.new")),
        label(t("course.title"), title),
        label(t("assignment.start"), start),
        label(t("assignment.deadline"), deadline),
        el("button", { type: "submit" }, t("common.save")),
      ),
    );
  }
  return panel;
}

async function submissionsPanel(
  state: ViewState,
  assignment: AssignmentDoc,
  nameOf: (id: string) => string,
  status: HTMLElement,
  refresh: () => void,
): Promise<HTMLElement> {
  const gate = state.gate;
  const user = state.user!;
  const panel = el("div", { class: "submissions" });
  let submissions: SubmissionDoc[] = [];
  try {
    submissions = await state.api.submissions(assignment.assignment_id);
  } catch (error) {
    if (error instanceof ApiError) {
      panel.append(notice("error", `${error.code}: ${error.message}`));
      return panel;
    }
    throw error;
  }

  for (const submission of submissions) {
    const row = el(
      "div",
      { class: "submission-row", "data-submission": submission.submission_id },
      el(
        "p",
        {},
        `${nameOf(submission.novice_id)} → ${nameOf(submission.guide_id)} — ` +
          `${t("assignment.state")}: ${submission.state}` +
          (submission.teacher_grade !== null ? ` — ${submission.teacher_grade}` : ""),
      ),
    );

    const thread = el("div", { class: "feedback-thread" });
    for (const feedback of submission.feedback_thread) {
      thread.append(el("p", { class: "feedback" }, `${nameOf(feedback.author_id)}: ${feedback.body}`));
    }
    row.append(thread);

    const canDraft =
      submission.novice_id === user.user_id &&
      gate.can("submit_work") &&
      (submission.state === "drafting" || submission.state === "guide_evaluated");
    if (canDraft) {
      const file = el("input", { type: "file" });
      row.append(
        file,
        actionButton(t("assignment.submit"), status, async () => {
          const chosen = file.files?.[0];
          if (!chosen) return;
          const bytes = new Uint8Array(await chosen.arrayBuffer());
          const uploaded = await state.api.uploadAttachment(chosen.name, chosen.type, bytes);
          await state.api.submitDraft(submission.submission_id, [uploaded]);
          refresh();
        }),
      );
    }

    const isGuide = submission.guide_id === user.user_id;
    if (isGuide && gate.can("post_feedback") && submission.state === "awaiting_guide") {
      const body = el("input", { name: "feedback_body", placeholder: t("assignment.feedback") });
      row.append(
        body,
        actionButton(t("assignment.send_feedback"), status, async () => {
          await state.api.postFeedback(submission.submission_id, body.value);
          refresh();
        }),
      );
    }
    if (isGuide && gate.can("guide_evaluate") && submission.state === "awaiting_guide") {
      row.append(
        actionButton(t("assignment.approve"), status, async () => {
          await state.api.guideEvaluate(submission.submission_id, "approve");
          refresh();
        }),
        actionButton(t("assignment.revise"), status, async () => {
          await state.api.guideEvaluate(submission.submission_id, "revise");
          refresh();
        }),
      );
    }

    if (gate.can("teacher_grade") && submission.state === "forwarded_to_teacher") {
      const score = el("input", { name: "grade_score", placeholder: "0-100", class: "score" });
      row.append(
        score,
        actionButton(t("assignment.grade"), status, async () => {
          await state.api.teacherGrade(submission.submission_id, Number(score.value));
          refresh();
        }),
      );
    }
    panel.append(row);
  }
  return panel;
}

// -- Tartışmalar -----------------------------------------------------------------

async function discussionsTab(
  state: ViewState,
  course: CourseDoc,
  nameOf: (id: string) => string,
  status: HTMLElement,
  refresh: () => void,
): Promise<HTMLElement> {
  const panel = el("section", {});
  const discussions = await state.api.discussions(course.course_id);
  if (!discussions.length) panel.append(el("p", {}, t("common.empty")));
  for (const discussion of discussions) {
    const article = el(
      "article",
      { class: "discussion" },
      el("h3", {}, discussion.topic),
      el("p", {}, `${nameOf(discussion.author_id)}: ${discussion.body}`),
    );
    for (const reply of discussion.replies) {
      article.append(el("p", { class: "reply" }, `${nameOf(reply.author_id)}: ${reply.body}`));
    }
    if (state.gate.can("reply_discussion")) {
      const body = el("input", { name: "reply_body" });
      article.append(
        body,
        actionButton(t("discussions.reply"), status, async () => {
          await state.api.replyDiscussion(discussion.discussion_id, body.value);
          refresh();
        }),
      );
    }
    panel.append(article);
  }
  if (state.gate.can("open_discussion")) {
    const topic = el("input", { name: "discussion_topic" });
    const body = el("textarea", { name: "discussion_body" });
    panel.append(
      el("h3", {}, t("discussions.open")),
      topic,
      body,
      actionButton(t("common.send"), status, async () => {
        await state.api.openDiscussion(course.course_id, topic.value, body.value);
        refresh();
      }),
    );
  }
  return panel;
}

// -- Notlar -----------------------------------------------------------------

async function gradesTab(
  state: ViewState,
  course: CourseDoc,
  nameOf: (id: string) => string,
  status: HTMLElement,
): Promise<HTMLElement> {
  void status;
  const panel = el("section", {});
  const [rows, assignments] = await Promise.all([
    state.api.grades(course.course_id),
    state.api.assignments(course.course_id),
  ]);
  const table = el(
    "table",
    { class: "grade-table" },
    el(
      "thead",
      {},
      el(
        "tr",
        {},
        el("th", {}, t("grades.student")),
        ...assignments.map((assignment) => el("th", {}, assignment.title)),
        el("th", {}, t("grades.average")),
      ),
    ),
  );
  const body = el("tbody", {});
  for (const row of rows) {
    body.append(
      el(
        "tr",
        {},
        el("td", {}, nameOf(row.novice_id)),
        ...assignments.map((assignment) => {
          const grade = row.per_assignment_grades[assignment.assignment_id];
          return el("td", {}, grade === null || grade === undefined ? "—" : String(grade));
        }),
        el("td", { class: "average" }, row.average === null ? "—" : row.average.toFixed(2)),
      ),
    );
  }
  table.append(body);
  panel.append(table);
  return panel;
}

// -- Katılımcılar -----------------------------------------------------------------

function participantsTab(roster: RosterRow[]): HTMLElement {
  const panel = el("section", {});
  if (!roster.length) {
    panel.append(el("p", {}, t("common.empty")));
    return panel;
  }
  const list = el("ul", { class: "roster" });
  for (const row of roster) {
    const roleLabel = row.course_role === "novice" ? t("roster.novice") : t("roster.guide");
    list.append(el("li", {}, `${row.display_name} — ${roleLabel}`));
  }
  panel.append(list);
  return panel;
}

// -- Ders Programı -----------------------------------------------------------------

async function scheduleTab(state: ViewState, course: CourseDoc): Promise<HTMLElement> {
  const assignments = await state.api.assignments(course.course_id);
  const rows = [
    el(
      "tr",
      {},
      el("td", {}, course.title),
      el("td", {}, formatDate(course.start_date)),
      el("td", {}, formatDate(course.end_date)),
    ),
    ...assignments.map((assignment) =>
      el(
        "tr",
        {},
        el("td", {}, assignment.title),
        el("td", {}, formatDate(assignment.start_date)),
        el("td", {}, formatDate(assignment.deadline)),
      ),
    ),
  ];
  return el(
    "section",
    {},
    el(
      "table",
      { class: "schedule" },
      el(
        "thead",
        {},
        el(
          "tr",
          {},
          el("th", {}, t("course.title")),
          el("th", {}, t("course.start")),
          el("th", {}, t("course.end")),
        ),
      ),
      el("tbody", {}, ...rows),
    ),
  );
}

// -- Öğretmene Sor -----------------------------------------------------------------

async function questionsTab(
  state: ViewState,
  course: CourseDoc,
  nameOf: (id: string) => string,
  status: HTMLElement,
  refresh: () => void,
): Promise<HTMLElement> {
  const panel = el("section", {});
  const questions = await state.api.questions(course.course_id);
  if (!questions.length) panel.append(el("p", {}, t("common.empty")));
  for (const question of questions) {
    const article = el(
      "article",
      { class: "question" },
      el("p", {}, `${nameOf(question.novice_id)}: ${question.body}`),
    );
    if (question.answer !== null) {
      article.append(el("p", { class: "answer" }, `${nameOf(course.teacher_id)}: ${question.answer}`));
    } else if (state.gate.can("answer_question")) {
      const body = el("input", { name: "answer_body" });
      article.append(
        body,
        actionButton(t("questions.answer"), status, async () => {
          await state.api.answerQuestion(question.question_id, body.value);
          refresh();
        }),
      );
    }
    panel.append(article);
  }
  if (state.gate.can("ask_teacher")) {
    const body = el("textarea", { name: "question_body" });
    panel.append(
      el("h3", {}, t("questions.ask")),
      body,
      actionButton(t("common.send"), status, async () => {
        await state.api.askQuestion(course.course_id, body.value);
        refresh();
      }),
    );
  }
  return panel;
}

// -- shared -----------------------------------------------------------------

function actionButton(
  caption: string,
  status: HTMLElement,
  action: () => Promise<void>,
): HTMLButtonElement {
  return el(
    "button",
    {
      type: "button",
      onclick: () => {
        void (async () => {
          try {
            clear(status);
            await action();
          } catch (error) {
            showError(status, error);
          }
        })();
      },
    },
    caption,
  );
}
