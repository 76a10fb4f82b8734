/** Application shell: header, router, and the signed-in/out guard. */

import { clear, el } from "./dom.js";
import { getLocale, setLocale, t } from "./i18n.js";
import { parsePath, pathFor, Router, type Route } from "./router.js";
import { ViewState } from "./state.js";
import { renderCourse } from "./views/course.js";
import { renderLogin } from "./views/login.js";
import { renderPortfolio } from "./views/portfolio.js";
import { renderProfile } from "./views/profile.js";

export function startApp(baseUrl = ""): Router {
  const state = new ViewState(baseUrl);

  const headerSlot = el("header", { id: "chrome" });
  const main = el("main", { id: "view" });
  const root = document.getElementById("app") ?? document.body;
  clear(root);
  root.append(headerSlot, main);

  const router: Router = new Router((route) => {
    void show(route);
  });

  async function show(route: Route): Promise<void> {
    if (!state.user) await state.resume();
    renderChrome();
    clear(main);
    if (!state.user) {
      renderLogin(main, state, () => router.navigate({ screen: "profile" }));
      return;
    }
    switch (route.screen) {
      case "login":
        router.navigate({ screen: "profile" });
        return;
      case "profile":
        await renderProfile(main, state, {
          openCourse: (courseId) => router.navigate({ screen: "course", courseId }),
          openPortfolio: (userId) => router.navigate({ screen: "portfolio", userId }),
        });
        return;
      case "course":
        await renderCourse(main, state, route.courseId, {
          openPortfolio: (userId) => router.navigate({ screen: "portfolio", userId }),
        });
        return;
      case "portfolio":
        await renderPortfolio(main, state, route.userId);
        return;
    }
  }

  function renderChrome(): void {
    clear(headerSlot);
    const localeToggle = el(
      "button",
      {
        type: "button",
        class: "locale-toggle",
        onclick: () => {
          setLocale(getLocale() === "tr" ? "en" : "tr");
          router.navigate(parsePath(location.pathname));
        },
      },
      getLocale() === "tr" ? "EN" : "TR",
    );
    const nav = el("nav", {});
    if (state.user) {
      nav.append(
        el(
          "a",
          { href: pathFor({ screen: "profile" }), onclick: link(router, { screen: "profile" }) },
          t("nav.profile"),
        ),
        el(
          "a",
          {
            href: pathFor({ screen: "portfolio", userId: state.user.user_id }),
            onclick: link(router, { screen: "portfolio", userId: state.user.user_id }),
          },
          t("nav.portfolio"),
        ),
        el(
          "button",
          {
            type: "button",
            class: "logout",
            onclick: () => {
              void state.signOut().then(() => router.navigate({ screen: "login" }));
            },
          },
          t("nav.logout"),
        ),
        el("span", { class: "whoami" }, state.user.display_name),
      );
    }
    headerSlot.append(el("h1", {}, t("app.title")), nav, localeToggle);
  }

  router.start();
  return router;
}

function link(router: Router, route: Route) {
  return (event: Event) => {
    event.preventDefault();
    router.navigate(route);
  };
}
