/** History-API routing over four screens:
 * /login, /profile, /courses/{id}, /portfolio/{userId}. */

export type Route =
  | { screen: "login" }
  | { screen: "profile" }
  | { screen: "course"; courseId: string }
  | { screen: "portfolio"; userId: string };

export function parsePath(path: string): Route {
  const course = /^\/courses\/([^/]+)$/.exec(path);
  if (course && course[1]) return { screen: "course", courseId: course[1] };
  const portfolio = /^\/portfolio\/([^/]+)$/.exec(path);
  if (portfolio && portfolio[1]) return { screen: "portfolio", userId: portfolio[1] };
  if (path === "/profile") return { screen: "profile" };
  return { screen: "login" };
}

export function pathFor(route: Route): string {
  switch (route.screen) {
    case "login":
      return "/login";
    case "profile":
      return "/profile";
    case "course":
      return `/courses/${route.courseId}`;
    case "portfolio":
      return `/portfolio/${route.userId}`;
  }
}

export class Router {
  constructor(private readonly render: (route: Route) => void) {
    window.addEventListener("popstate", () => this.render(parsePath(location.pathname)));
  }

  start(): void {
    this.render(parsePath(location.pathname));
  }

  navigate(route: Route): void {
    history.pushState(null, "", pathFor(route));
    this.render(route);
  }
}
