/** Locale layer. Turkish is the canonical voice of the screens — tab
 * names and button captions are fixed vocabulary — and English is a
 * translation layer over the same keys. */

export type Locale = "tr" | "en";

export type TabId =
  | "anasayfa"
  | "kilavuz"
  | "duyurular"
  | "odevler"
  | "tartismalar"
  | "notlar"
  | "katilimcilar"
  | "ders-programi"
  | "ogretmene-sor";

/** The nine course-module tabs, in display order. Labels are verbatim. */
export const TABS: ReadonlyArray<{ id: TabId; tr: string; en: string }> = [
  { id: "anasayfa", tr: "Anasayfa", en: "Home" },
  { id: "kilavuz", tr: "Kılavuz", en: "Guide" },
  { id: "duyurular", tr: "Duyurular", en: "Announcements" },
  { id: "odevler", tr: "Ödevler", en: "Assignments" },
  { id: "tartismalar", tr: "Tartışmalar", en: "Discussions" },
  { id: "notlar", tr: "Notlar", en: "Grades" },
  { id: "katilimcilar", tr: "Katılımcılar", en: "Participants" },
  { id: "ders-programi", tr: "Ders Programı", en: "Schedule" },
  { id: "ogretmene-sor", tr: "Öğretmene Sor", en: "Ask the Teacher" },
];

const STRINGS = {
  "app.title": { tr: "Hücresel Bilgi Ağı", en: "Cellular Knowledge Network" },
  "nav.profile": { tr: "Profil", en: "Profile" },
  "nav.portfolio": { tr: "Portfolyo", en: "Portfolio" },
  "nav.logout": { tr: "Çıkış", en: "Log out" },
  "login.title": { tr: "Giriş", en: "Sign in" },
  "login.name": { tr: "Kullanıcı Adı", en: "User name" },
  "login.password": { tr: "Şifre", en: "Password" },
  "login.submit": { tr: "Giriş Yap", en: "Sign in" },
  "register.title": { tr: "Kayıt Ol", en: "Register" },
  "register.intent": { tr: "Üyelik Türü", en: "Membership" },
  "register.intent.student": { tr: "Öğrenci", en: "Student" },
  "register.intent.alumni": { tr: "Mezun", en: "Alumni" },
  "register.intent.teacher": { tr: "Öğretmen", en: "Teacher" },
  "register.prior": { tr: "Önceden Alınan Dersler", en: "Prior courses" },
  "register.prior.add": { tr: "Ders Ekle", en: "Add course" },
  "register.prior.title": { tr: "Dersin Adı", en: "Course title" },
  "register.prior.letter": { tr: "Harf Notu", en: "Letter grade" },
  "register.prior.score": { tr: "Not (0-100)", en: "Score (0-100)" },
  "register.teachable": { tr: "Verebileceği Dersler", en: "Teachable courses" },
  "register.submit": { tr: "Kayıt Ol", en: "Register" },
  "profile.roles": { tr: "Roller", en: "Roles" },
  "profile.transcript": { tr: "Transkript", en: "Transcript" },
  "profile.photo": { tr: "Resim Yükle-Değiştir", en: "Upload or change photo" },
  "profile.apply_teacher": { tr: "Öğretmenlik Başvurusu", en: "Apply to teach" },
  "profile.apply_teacher.send": { tr: "Başvuru Gönder", en: "Send application" },
  "profile.courses": { tr: "Dersler", en: "Courses" },
  "profile.new_course": { tr: "Yeni Ders Aç", en: "Request a course" },
  "profile.approvals": { tr: "Onaylar", en: "Approvals" },
  "profile.approve": { tr: "Onayla", en: "Approve" },
  "profile.reject": { tr: "Reddet", en: "Reject" },
  "profile.rollover": { tr: "Dönemi Kapat", en: "Close the term" },
  "course.title": { tr: "Dersin Adı", en: "Course title" },
  "course.content": { tr: "Dersin İçeriği", en: "Course content" },
  "course.start": { tr: "Başlangıç", en: "Start" },
  "course.end": { tr: "Bitiş", en: "End" },
  "course.state": { tr: "Durum", en: "State" },
  "course.create": { tr: "Ders Talep Et", en: "Request course" },
  "course.open_enrollment": { tr: "Kayıtları Aç", en: "Open enrollment" },
  "course.enroll": { tr: "Derse Kayıt Ol", en: "Enroll" },
  "course.close": { tr: "Dersi Kapat", en: "Close the course" },
  "course.access_denied": {
    tr: "Bu ders modülü yalnızca katılımcılara açıktır.",
    en: "This course module is open to participants only.",
  },
  "guide.candidates": { tr: "Kılavuz Adayları", en: "Guide candidates" },
  "guide.invite": { tr: "Davet Gönder", en: "Send invitations" },
  "guide.pending": { tr: "Bekleyen Davetler", en: "Pending invitations" },
  "guide.incoming": { tr: "Gelen Davetler", en: "Incoming invitations" },
  "guide.accept": { tr: "Kabul Et", en: "Accept" },
  "guide.decline": { tr: "Reddet", en: "Decline" },
  "guide.select": { tr: "Kılavuz Seç", en: "Choose guide" },
  "guide.mine": { tr: "Kılavuzum", en: "My guide" },
  "guide.full": { tr: "Kontenjan Doldu", en: "At capacity" },
  "materials.title": { tr: "Ders Materyalleri", en: "Course materials" },
  "materials.publish": { tr: "Materyal Yayınla", en: "Publish material" },
  "assignment.new": { tr: "Yeni Ödev", en: "New assignment" },
  "assignment.activate": { tr: "Ödev Aktif Yap", en: "Activate assignment" },
  "assignment.start": { tr: "Başlangıç", en: "Start" },
  "assignment.deadline": { tr: "Son Teslim", en: "Deadline" },
  "assignment.submit": { tr: "Ödevi Gönder", en: "Submit work" },
  "assignment.feedback": { tr: "Geri Bildirim", en: "Feedback" },
  "assignment.send_feedback": { tr: "Geri Bildirim Gönder", en: "Send feedback" },
  "assignment.approve": { tr: "Onayla ve İlet", en: "Approve and forward" },
  "assignment.revise": { tr: "Düzeltme İste", en: "Request revision" },
  "assignment.grade": { tr: "Notlandır", en: "Grade" },
  "assignment.state": { tr: "Durum", en: "State" },
  "announcements.post": { tr: "Duyuru Yayınla", en: "Post announcement" },
  "discussions.open": { tr: "Tartışma Aç", en: "Open discussion" },
  "discussions.reply": { tr: "Yanıtla", en: "Reply" },
  "questions.ask": { tr: "Soru Sor", en: "Ask a question" },
  "questions.answer": { tr: "Cevapla", en: "Answer" },
  "grades.average": { tr: "Ortalama", en: "Average" },
  "grades.student": { tr: "Öğrenci", en: "Student" },
  "portfolio.title": { tr: "Portfolyo", en: "Portfolio" },
  "portfolio.empty": { tr: "Portfolyo boş.", en: "The portfolio is empty." },
  "roster.novice": { tr: "Çaylak", en: "Novice" },
  "roster.guide": { tr: "Kılavuz", en: "Guide" },
  "common.send": { tr: "Gönder", en: "Send" },
  "common.save": { tr: "Kaydet", en: "Save" },
  "common.empty": { tr: "Henüz kayıt yok.", en: "Nothing here yet." },
  "error.denied": { tr: "Bu işlem için yetkiniz yok.", en: "You are not allowed to do this." },
} as const;

export type StringKey = keyof typeof STRINGS;

let current: Locale = "tr";

export function setLocale(locale: Locale): void {
  current = locale;
}

export function getLocale(): Locale {
  return current;
}

/** Translate a fixed key in the current locale. */
export function t(key: StringKey): string {
  return STRINGS[key][current];
}

/** The visible label of a tab in the current locale. */
export function tabLabel(id: TabId): string {
  const tab = TABS.find((candidate) => candidate.id === id);
  if (!tab) throw new Error(`unknown tab ${id}`);
  return current === "tr" ? tab.tr : tab.en;
}
