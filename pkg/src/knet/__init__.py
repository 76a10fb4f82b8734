"""knet: a mentored-learning knowledge network service.

Courses run through a fixed workflow: teachers request courses, an admin
approves them, novices enroll and pick a guide through a capped
invitation protocol, materials and assignments open once everyone is
matched, submissions pass through guide review before teacher grading,
and closing a course writes transcripts that feed next term's guide
eligibility. All state changes are appended to a replayable journal.
"""

__version__ = "0.1.0"
