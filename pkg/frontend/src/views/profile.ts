/** Profile: the member card, transcript, photo control, teacher
 * application, course list, and — for the admin — the approval queue and
 * term rollover. Controls appear only when the matrix allows the action. */

import type { CourseDoc, ApplicationDoc } from "../api.js";
import { formatDate } from "../dates.js";
import { clear, el, notice } from "../dom.js";
import { t } from "../i18n.js";
import type { ViewState } from "../state.js";
import { label, showError } from "./login.js";

const MAX_PHOTO_BYTES = 2 * 1024 * 1024;

export interface ProfileActions {
  openCourse: (courseId: string) => void;
  openPortfolio: (userId: string) => void;
}

export async function renderProfile(
  root: HTMLElement,
  state: ViewState,
  actions: ProfileActions,
): Promise<void> {
  clear(root);
  const user = state.user;
  if (!user) return;
  const gate = state.gate;
  const status = el("div", { class: "status" });
  const refresh = () => renderProfile(root, state, actions);

  const card = el(
    "section",
    { class: "card" },
    el("h2", {}, user.display_name),
    el("p", {}, `${t("profile.roles")}: ${user.roles.join(", ") || "—"}`),
    photoControl(state, status, refresh),
    el(
      "p",
      {},
      el(
        "a",
        {
          href: `/portfolio/${user.user_id}`,
          onclick: (event) => {
            event.preventDefault();
            actions.openPortfolio(user.user_id);
          },
        },
        t("nav.portfolio"),
      ),
    ),
  );

  const transcript = el(
    "section",
    { class: "card" },
    el("h3", {}, t("profile.transcript")),
    user.transcript.length
      ? el(
          "table",
          {},
          el(
            "thead",
            {},
            el(
              "tr",
              {},
              el("th", {}, t("register.prior.title")),
              el("th", {}, t("register.prior.letter")),
              el("th", {}, t("register.prior.score")),
              el("th", {}, "Dönem"),
            ),
          ),
          el(
            "tbody",
            {},
            ...user.transcript.map((entry) =>
              el(
                "tr",
                {},
                el("td", {}, entry.course_title),
                el("td", {}, entry.letter_grade),
                el("td", {}, String(entry.numeric_grade)),
                el("td", {}, entry.term_id),
              ),
            ),
          ),
        )
      : el("p", {}, t("common.empty")),
  );

  root.append(card, transcript);

  if (gate.can("apply_for_teacher") && !gate.has("teacher")) {
    root.append(teacherApplication(state, status, refresh));
  }

  root.append(await coursePanel(state, status, actions, refresh));

  if (gate.can("view_approvals")) {
    root.append(await approvalsPanel(state, status, refresh));
  }

  root.append(status);
}

function photoControl(state: ViewState, status: HTMLElement, refresh: () => void): HTMLElement {
  const input = el("input", { type: "file", accept: "image/png,image/jpeg,image/gif" });
  const photoRef = state.user?.profile["photo_ref"];
  return el(
    "div",
    { class: "photo-control" },
    typeof photoRef === "string"
      ? el("img", { src: `/api/attachments/${photoRef}`, alt: "", class: "avatar" })
      : null,
    label(t("profile.photo"), input),
    el(
      "button",
      {
        type: "button",
        onclick: () => {
          void (async () => {
            const file = input.files?.[0];
            if (!file) return;
            if (file.size > MAX_PHOTO_BYTES) {
              clear(status);
              status.append(notice("error", "validation_error: resim 2 MB sınırını aşıyor"));
              return;
            }
            try {
              const bytes = new Uint8Array(await file.arrayBuffer());
              const uploaded = await state.api.uploadAttachment(file.name, file.type, bytes);
              await state.api.setPhoto(state.user!.user_id, uploaded.attachment_id);
              await state.refreshUser();
              refresh();
            } catch (error) {
              showError(status, error);
            }
          })();
        },
      },
      t("common.save"),
    ),
  );
}

function teacherApplication(
  state: ViewState,
  status: HTMLElement,
  refresh: () => void,
): HTMLElement {
  const university = el("input", { name: "app_university" });
  const faculty = el("input", { name: "app_faculty" });
  const department = el("input", { name: "app_department" });
  const teachable = el("input", { name: "app_teachable", placeholder: "Ders A; Ders B" });
  return el(
    "form",
    {
      class: "card",
      onsubmit: (event) => {
        event.preventDefault();
        void (async () => {
          try {
            await state.api.applyForTeacher({
              university: university.value,
              faculty: faculty.value,
              department: department.value,
              teachable_courses: teachable.value.split(";").map((s) => s.trim()).filter(Boolean),
            });
            refresh();
          } catch (error) {
            showError(status, error);
          }
        })();
      },
    },
    el("h3", {}, t("profile.apply_teacher")),
    label("Üniversite", university),
    label("Fakülte", faculty),
    label("Bölüm", department),
    label(t("register.teachable"), teachable),
    el("button", { type: "submit" }, t("profile.apply_teacher.send")),
  );
}

async function coursePanel(
  state: ViewState,
  status: HTMLElement,
  actions: ProfileActions,
  refresh: () => void,
): Promise<HTMLElement> {
  const gate = state.gate;
  const panel = el("section", { class: "card" }, el("h3", {}, t("profile.courses")));
  let courses: CourseDoc[] = [];
  try {
    courses = await state.api.courses();
  } catch (error) {
    showError(status, error);
  }
  const list = el("ul", { class: "course-list" });
  for (const course of courses) {
    list.append(
      el(
        "li",
        {},
        el(
          "a",
          {
            href: `/courses/${course.course_id}`,
            onclick: (event) => {
              event.preventDefault();
              actions.openCourse(course.course_id);
            },
          },
          course.title,
        ),
        ` — ${course.state} (${formatDate(course.start_date)} → ${formatDate(course.end_date)})`,
      ),
    );
  }
  panel.append(courses.length ? list : el("p", {}, t("common.empty")));

  if (gate.can("request_course")) {
    const title = el("input", { name: "course_title" });
    const content = el("input", { name: "course_content" });
    const start = el("input", { name: "course_start", placeholder: "GG-AA-YYYY" });
    const end = el("input", { name: "course_end", placeholder: "GG-AA-YYYY" });
    panel.append(
      el(
        "form",
        {
          onsubmit: (event) => {
            event.preventDefault();
            void (async () => {
              try {
                await state.api.createCourse({
                  title: title.value,
                  content: content.value,
                  start_date: displayToIso(start.value),
                  end_date: displayToIso(end.value),
                });
                refresh();
              } catch (error) {
                showError(status, error);
              }
            })();
          },
        },
        el("h4", {}, t("profile.new_course")),
        label(t("course.title"), title),
        label(t("course.content"), content),
        label(t("course.start"), start),
        label(t("course.end"), end),
        el("button", { type: "submit" }, t("course.create")),
      ),
    );
  }

  if (gate.can("rollover_term")) {
    panel.append(
      el(
        "button",
        {
          type: "button",
          class: "danger",
          onclick: () => {
            void (async () => {
              try {
                await state.api.rolloverTerm();
                refresh();
              } catch (error) {
                showError(status, error);
              }
            })();
          },
        },
        t("profile.rollover"),
      ),
    );
  }
  return panel;
}

async function approvalsPanel(
  state: ViewState,
  status: HTMLElement,
  refresh: () => void,
): Promise<HTMLElement> {
  const panel = el("section", { class: "card" }, el("h3", {}, t("profile.approvals")));
  let queue: { teacher_applications: ApplicationDoc[]; course_requests: CourseDoc[] };
  try {
    queue = await state.api.approvals();
  } catch (error) {
    showError(status, error);
    return panel;
  }

  const decide = (target: "teacher-application" | "course-request", id: string, yes: boolean) => {
    void (async () => {
      try {
        await state.api.decideApproval(target, id, yes ? "approved" : "denied");
        refresh();
      } catch (error) {
        showError(status, error);
      }
    })();
  };

  for (const application of queue.teacher_applications) {
    panel.append(
      el(
        "div",
        { class: "approval-row" },
        el("span", {}, `Öğretmen: ${application.user_id} (${application.teachable_courses.join(", ")})`),
        el(
          "button",
          { type: "button", onclick: () => decide("teacher-application", application.application_id, true) },
          t("profile.approve"),
        ),
        el(
          "button",
          { type: "button", onclick: () => decide("teacher-application", application.application_id, false) },
          t("profile.reject"),
        ),
      ),
    );
  }
  for (const course of queue.course_requests) {
    panel.append(
      el(
        "div",
        { class: "approval-row" },
        el("span", {}, `Ders: ${course.title} (${course.teacher_name})`),
        el(
          "button",
          { type: "button", onclick: () => decide("course-request", course.course_id, true) },
          t("profile.approve"),
        ),
        el(
          "button",
          { type: "button", onclick: () => decide("course-request", course.course_id, false) },
          t("profile.reject"),
        ),
      ),
    );
  }
  if (!queue.teacher_applications.length && !queue.course_requests.length) {
    panel.append(el("p", {}, t("common.empty")));
  }
  return panel;
}

/** Screens take DD-MM-YYYY; the API takes ISO. */
export function displayToIso(text: string): string {
  const m = /^(\d{2})-(\d{2})-(\d{4})$/.exec(text.trim());
  if (m) return `${m[3]}-${m[2]}-${m[1]}`;
  return text.trim();
}
