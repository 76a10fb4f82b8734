/** Sign-in and registration. Registration mirrors the intake form: the
 * membership type, prior courses with letter or numeric grades (guides
 * earn eligibility from these), and teachable courses for teachers. */

import { ApiError, type PriorCourse } from "../api.js";
import { clear, el, notice } from "../dom.js";
import { t } from "../i18n.js";
import type { ViewState } from "../state.js";

export function renderLogin(
  root: HTMLElement,
  state: ViewState,
  onSignedIn: () => void,
): void {
  clear(root);
  const status = el("div", { class: "status" });

  const loginName = el("input", { name: "display_name", autocomplete: "username" });
  const loginPassword = el("input", {
    name: "password",
    type: "password",
    autocomplete: "current-password",
  });
  const loginForm = el(
    "form",
    {
      class: "card",
      onsubmit: (event) => {
        event.preventDefault();
        void (async () => {
          try {
            await state.signIn(loginName.value, loginPassword.value);
            onSignedIn();
          } catch (error) {
            showError(status, error);
          }
        })();
      },
    },
    el("h2", {}, t("login.title")),
    label(t("login.name"), loginName),
    label(t("login.password"), loginPassword),
    el("button", { type: "submit" }, t("login.submit")),
  );

  root.append(loginForm, registrationForm(state, status, onSignedIn), status);
}

function registrationForm(
  state: ViewState,
  status: HTMLElement,
  onSignedIn: () => void,
): HTMLElement {
  const name = el("input", { name: "reg_name" });
  const password = el("input", { name: "reg_password", type: "password" });
  const intent = el(
    "select",
    { name: "reg_intent" },
    el("option", { value: "student" }, t("register.intent.student")),
    el("option", { value: "alumni" }, t("register.intent.alumni")),
    el("option", { value: "teacher" }, t("register.intent.teacher")),
  );
  const teachable = el("input", { name: "reg_teachable", placeholder: "Ders A; Ders B" });
  const teachableRow = label(t("register.teachable"), teachable);
  teachableRow.hidden = true;
  intent.addEventListener("change", () => {
    teachableRow.hidden = intent.value !== "teacher";
  });

  const priorRows = el("div", { class: "prior-rows" });
  const addPrior = el(
    "button",
    {
      type: "button",
      onclick: () => priorRows.append(priorRow()),
    },
    t("register.prior.add"),
  );

  return el(
    "form",
    {
      class: "card",
      onsubmit: (event) => {
        event.preventDefault();
        void (async () => {
          try {
            const priors = collectPriors(priorRows);
            await state.api.register({
              display_name: name.value,
              password: password.value,
              role_intent: intent.value as "student" | "alumni" | "teacher",
              intake: {
                teachable_courses:
                  intent.value === "teacher"
                    ? teachable.value.split(";").map((s) => s.trim()).filter(Boolean)
                    : [],
                prior_courses: priors,
              },
            });
            await state.signIn(name.value, password.value);
            onSignedIn();
          } catch (error) {
            showError(status, error);
          }
        })();
      },
    },
    el("h2", {}, t("register.title")),
    label(t("login.name"), name),
    label(t("login.password"), password),
    label(t("register.intent"), intent),
    teachableRow,
    el("h3", {}, t("register.prior")),
    priorRows,
    addPrior,
    el("button", { type: "submit" }, t("register.submit")),
  );
}

function priorRow(): HTMLElement {
  return el(
    "div",
    { class: "prior-row" },
    el("input", { name: "prior_title", placeholder: t("register.prior.title") }),
    el("input", { name: "prior_letter", placeholder: t("register.prior.letter") }),
    el("input", { name: "prior_score", placeholder: t("register.prior.score") }),
  );
}

function collectPriors(rows: HTMLElement): PriorCourse[] {
  const priors: PriorCourse[] = [];
  for (const row of rows.querySelectorAll<HTMLElement>(".prior-row")) {
    const title = row.querySelector<HTMLInputElement>("[name=prior_title]")?.value.trim();
    const letter = row.querySelector<HTMLInputElement>("[name=prior_letter]")?.value.trim();
    const score = row.querySelector<HTMLInputElement>("[name=prior_score]")?.value.trim();
    if (!title) continue;
    const prior: PriorCourse = { course_title: title };
    if (letter) prior.letter_grade = letter.toUpperCase();
    if (score) prior.numeric_grade = Number(score);
    priors.push(prior);
  }
  return priors;
}

export function label(text: string, control: HTMLElement): HTMLElement {
  return el("label", {}, el("span", {}, text), control);
}

export function showError(status: HTMLElement, error: unknown): void {
  clear(status);
  if (error instanceof ApiError) {
    status.append(notice("error", `${error.code}: ${error.message}`));
  } else {
    status.append(notice("error", String(error)));
  }
}
