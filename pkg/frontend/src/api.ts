/** Typed client for the knet HTTP API. Every state change in the UI goes
 * through this module; errors carry the server's machine code verbatim. */

export interface ErrorEnvelope {
  error: { code: string; message: string; details?: Record<string, unknown> };
}

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    public readonly code: string,
    message: string,
    public readonly details?: Record<string, unknown>,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

// -- wire documents -----------------------------------------------------------

export interface TranscriptEntry {
  course_title: string;
  term_id: string;
  letter_grade: string;
  numeric_grade: number;
}

export interface UserDoc {
  user_id: string;
  display_name: string;
  roles: string[];
  profile: Record<string, unknown>;
  transcript: TranscriptEntry[];
}

export interface SessionDoc {
  token: string;
  expires_at: string;
  user: UserDoc;
}

export interface PriorCourse {
  course_title: string;
  numeric_grade?: number;
  letter_grade?: string;
}

export interface IntakeForm {
  university?: string;
  faculty?: string;
  department?: string;
  teachable_courses?: string[];
  prior_courses?: PriorCourse[];
}

export interface CourseDoc {
  course_id: string;
  title: string;
  content: string;
  teacher_id: string;
  teacher_name: string;
  term_id: string;
  start_date: string;
  end_date: string;
  state: string;
  enrolled_novices: string[];
  denial_reason: string | null;
  all_matched: boolean;
  counts: Record<string, number>;
}

export interface InvitationDoc {
  invitation_id: string;
  course_id: string;
  novice_id: string;
  guide_id: string;
  status: string;
  course_title: string | null;
  novice_name: string | null;
  guide_name: string | null;
}

export interface InvitationInbox {
  received: InvitationDoc[];
  sent: InvitationDoc[];
}

export interface SelectionDoc {
  match: { course_id: string; novice_id: string; guide_id: string; invitation_id: string };
  course: CourseDoc;
}

export interface CandidateDoc {
  user_id: string;
  display_name: string;
}

export interface RosterRow {
  user_id: string;
  display_name: string;
  course_role: string;
  guide_id: string | null;
}

export interface AttachmentRef {
  attachment_id: string;
  filename: string;
  media_type: string;
}

export interface MaterialDoc {
  material_id: string;
  course_id: string;
  attachment: AttachmentRef;
  caption: string | null;
  published_seq: number;
}

export interface AssignmentDoc {
  assignment_id: string;
  course_id: string;
  title: string;
  body: AttachmentRef | null;
  start_date: string;
  deadline: string;
  sequence_no: number;
  active: boolean;
}

export interface FeedbackDoc {
  author_id: string;
  body: string;
  sent_at: number;
}

export interface SubmissionDoc {
  submission_id: string;
  assignment_id: string;
  course_id: string;
  novice_id: string;
  guide_id: string;
  state: string;
  attachments: AttachmentRef[];
  feedback_thread: FeedbackDoc[];
  guide_evaluation: Record<string, string> | null;
  teacher_grade: number | null;
}

export interface ActivationDoc {
  assignment: AssignmentDoc;
  submissions: SubmissionDoc[];
}

export interface GradeRow {
  novice_id: string;
  per_assignment_grades: Record<string, number | null>;
  average: number | null;
}

export interface ClosureDoc {
  course: CourseDoc;
  final_grades: { novice_id: string; numeric_grade: number; letter_grade: string }[];
}

export interface PortfolioEntry {
  entry_id: string;
  owner_id: string;
  course_id: string;
  course_title: string;
  assignment_title: string;
  final_attachments: AttachmentRef[];
  teacher_grade: number;
  term_id: string;
  graded_seq: number;
}

export interface AnnouncementDoc {
  announcement_id: string;
  course_id: string;
  author_id: string;
  body: string;
  posted_seq: number;
}

export interface QuestionDoc {
  question_id: string;
  course_id: string;
  novice_id: string;
  body: string;
  answer: string | null;
  asked_seq: number;
  answered_seq: number | null;
}

export interface DiscussionDoc {
  discussion_id: string;
  course_id: string;
  author_id: string;
  topic: string;
  body: string;
  opened_seq: number;
  replies: { author_id: string; body: string }[];
}

export interface ApplicationDoc {
  application_id: string;
  user_id: string;
  university: string;
  faculty: string;
  department: string;
  teachable_courses: string[];
  status: string;
  reason: string | null;
}

export interface ApprovalQueue {
  teacher_applications: ApplicationDoc[];
  course_requests: CourseDoc[];
}

export interface TermDoc {
  term_id: string;
  label: string;
  open: boolean;
}

export interface TermsDoc {
  open_term_id: string | null;
  terms: TermDoc[];
}

export interface RolloverDoc {
  closed_term_id: string;
  open_term: TermDoc;
}

export interface MatrixDoc {
  roles: string[];
  actions: Record<string, string[]>;
}

export interface HealthDoc {
  status: string;
  head_seq: number;
  today: string;
}

// -- the client -----------------------------------------------------------

export class ApiClient {
  token: string | null = null;

  constructor(private readonly base: string = "") {}

  private async call<T>(method: string, path: string, body?: unknown): Promise<T> {
    const headers: Record<string, string> = {};
    if (this.token) headers["Authorization"] = `Bearer ${this.token}`;
    if (body !== undefined) headers["Content-Type"] = "application/json";
    const response = await fetch(this.base + path, {
      method,
      headers,
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    if (response.status === 204) return undefined as T;
    const type = response.headers.get("content-type") ?? "";
    const payload = type.includes("application/json") ? await response.json() : null;
    if (!response.ok) {
      const envelope = payload as ErrorEnvelope | null;
      if (envelope && envelope.error) {
        throw new ApiError(
          response.status,
          envelope.error.code,
          envelope.error.message,
          envelope.error.details,
        );
      }
      throw new ApiError(response.status, "http_error", `HTTP ${response.status}`);
    }
    return payload as T;
  }

  get<T>(path: string): Promise<T> {
    return this.call<T>("GET", path);
  }

  post<T>(path: string, body: unknown): Promise<T> {
    return this.call<T>("POST", path, body);
  }

  // -- accounts and sessions ------------------------------------------------

  register(doc: {
    display_name: string;
    password: string;
    role_intent: "student" | "alumni" | "teacher";
    intake?: IntakeForm;
  }): Promise<UserDoc> {
    return this.post("/api/users", doc);
  }

  async login(display_name: string, password: string): Promise<SessionDoc> {
    const session = await this.post<SessionDoc>("/api/sessions", { display_name, password });
    this.token = session.token;
    return session;
  }

  async logout(): Promise<void> {
    await this.call<void>("DELETE", "/api/sessions/current");
    this.token = null;
  }

  me(): Promise<UserDoc> {
    return this.get("/api/users/me");
  }

  user(userId: string): Promise<UserDoc> {
    return this.get(`/api/users/${userId}`);
  }

  setPhoto(userId: string, attachmentId: string): Promise<UserDoc> {
    return this.post(`/api/users/${userId}/photo`, { attachment_id: attachmentId });
  }

  applyForTeacher(form: {
    university: string;
    faculty: string;
    department: string;
    teachable_courses: string[];
  }): Promise<ApplicationDoc> {
    return this.post("/api/teacher-applications", form);
  }

  // -- admin ----------------------------------------------------------------

  approvals(): Promise<ApprovalQueue> {
    return this.get("/api/admin/approvals");
  }

  decideApproval(
    target: "teacher-application" | "course-request",
    targetId: string,
    decision: "approved" | "denied",
  ): Promise<unknown> {
    return this.post("/api/admin/approvals", { target, target_id: targetId, decision });
  }

  rolloverTerm(): Promise<RolloverDoc> {
    return this.post("/api/admin/term-rollovers", {});
  }

  terms(): Promise<TermsDoc> {
    return this.get("/api/terms");
  }

  // -- courses ----------------------------------------------------------------

  createCourse(doc: {
    title: string;
    content: string;
    start_date: string;
    end_date: string;
  }): Promise<CourseDoc> {
    return this.post("/api/courses", doc);
  }

  courses(): Promise<CourseDoc[]> {
    return this.get("/api/courses");
  }

  course(courseId: string): Promise<CourseDoc> {
    return this.get(`/api/courses/${courseId}`);
  }

  openEnrollment(courseId: string): Promise<CourseDoc> {
    return this.post(`/api/courses/${courseId}/enrollment-opening`, {});
  }

  enroll(courseId: string): Promise<CourseDoc> {
    return this.post(`/api/courses/${courseId}/enrollments`, {});
  }

  roster(courseId: string): Promise<RosterRow[]> {
    return this.get(`/api/courses/${courseId}/roster`);
  }

  closeCourse(courseId: string): Promise<ClosureDoc> {
    return this.post(`/api/courses/${courseId}/closure`, {});
  }

  // -- matching ----------------------------------------------------------------

  guideCandidates(courseId: string): Promise<CandidateDoc[]> {
    return this.get(`/api/courses/${courseId}/guide-candidates`);
  }

  sendInvitations(courseId: string, guideIds: string[]): Promise<InvitationDoc[]> {
    return this.post(`/api/courses/${courseId}/invitations`, { guide_ids: guideIds });
  }

  invitations(userId: string): Promise<InvitationInbox> {
    return this.get(`/api/users/${userId}/invitations`);
  }

  respondInvitation(invitationId: string, accept: boolean): Promise<InvitationDoc> {
    return this.post(`/api/invitations/${invitationId}/response`, { accept });
  }

  selectGuide(courseId: string, invitationId: string): Promise<SelectionDoc> {
    return this.post(`/api/courses/${courseId}/guide-selection`, {
      invitation_id: invitationId,
    });
  }

  // -- coursework ----------------------------------------------------------------

  publishMaterial(
    courseId: string,
    attachment: AttachmentRef,
    caption?: string,
  ): Promise<MaterialDoc> {
    return this.post(`/api/courses/${courseId}/materials`, { attachment, caption });
  }

  materials(courseId: string): Promise<MaterialDoc[]> {
    return this.get(`/api/courses/${courseId}/materials`);
  }

  createAssignment(
    courseId: string,
    doc: { title: string; start_date: string; deadline: string; body?: AttachmentRef },
  ): Promise<AssignmentDoc> {
    return this.post(`/api/courses/${courseId}/assignments`, doc);
  }

  assignments(courseId: string): Promise<AssignmentDoc[]> {
    return this.get(`/api/courses/${courseId}/assignments`);
  }

  activateAssignment(assignmentId: string): Promise<ActivationDoc> {
    return this.post(`/api/assignments/${assignmentId}/activation`, {});
  }

  submissions(assignmentId: string): Promise<SubmissionDoc[]> {
    return this.get(`/api/assignments/${assignmentId}/submissions`);
  }

  submitDraft(submissionId: string, attachments: AttachmentRef[]): Promise<SubmissionDoc> {
    return this.post(`/api/submissions/${submissionId}/drafts`, { attachments });
  }

  postFeedback(submissionId: string, body: string): Promise<FeedbackDoc> {
    return this.post(`/api/submissions/${submissionId}/feedback`, { body });
  }

  guideEvaluate(
    submissionId: string,
    verdict: "approve" | "revise",
    comments = "",
  ): Promise<SubmissionDoc> {
    return this.post(`/api/submissions/${submissionId}/guide-evaluation`, { verdict, comments });
  }

  teacherGrade(submissionId: string, score: number): Promise<SubmissionDoc> {
    return this.post(`/api/submissions/${submissionId}/teacher-grade`, { score });
  }

  grades(courseId: string): Promise<GradeRow[]> {
    return this.get(`/api/courses/${courseId}/grades`);
  }

  portfolio(userId: string): Promise<PortfolioEntry[]> {
    return this.get(`/api/users/${userId}/portfolio`);
  }

  // -- communication ----------------------------------------------------------------

  postAnnouncement(courseId: string, body: string): Promise<AnnouncementDoc> {
    return this.post(`/api/courses/${courseId}/announcements`, { body });
  }

  announcements(courseId: string): Promise<AnnouncementDoc[]> {
    return this.get(`/api/courses/${courseId}/announcements`);
  }

  askQuestion(courseId: string, body: string): Promise<QuestionDoc> {
    return this.post(`/api/courses/${courseId}/questions`, { body });
  }

  questions(courseId: string): Promise<QuestionDoc[]> {
    return this.get(`/api/courses/${courseId}/questions`);
  }

  answerQuestion(questionId: string, body: string): Promise<QuestionDoc> {
    return this.post(`/api/questions/${questionId}/answer`, { body });
  }

  openDiscussion(courseId: string, topic: string, body: string): Promise<DiscussionDoc> {
    return this.post(`/api/courses/${courseId}/discussions`, { topic, body });
  }

  discussions(courseId: string): Promise<DiscussionDoc[]> {
    return this.get(`/api/courses/${courseId}/discussions`);
  }

  replyDiscussion(discussionId: string, body: string): Promise<DiscussionDoc> {
    return this.post(`/api/discussions/${discussionId}/replies`, { body });
  }

  // -- attachments and meta ----------------------------------------------------------------

  uploadAttachment(name: string, mediaType: string, bytes: Uint8Array): Promise<AttachmentRef> {
    let binary = "";
    for (const byte of bytes) binary += String.fromCharCode(byte);
    return this.post("/api/attachments", {
      filename: name,
      media_type: mediaType || "application/octet-stream",
      content_base64: btoa(binary),
    });
  }

  authorizationMatrix(): Promise<MatrixDoc> {
    return this.get("/api/meta/authorization");
  }

  health(): Promise<HealthDoc> {
    return this.get("/api/healthz");
  }
}
