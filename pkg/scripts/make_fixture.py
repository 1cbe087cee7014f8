#!/usr/bin/env python3
"""Generate the committed end-to-end fixture: a small, deliberately dirty corpus.

Four languages dominate (python, java, go, c++), with ruby/perl noise that the
top-K filter must cut. Every table carries nulls, out-of-range years, malformed
lines and broken foreign keys so the drop and join accounting is exercised.
Deterministic: rerunning this script reproduces the committed files byte for
byte.
"""

from __future__ import annotations

import argparse
import random
from pathlib import Path

YEARS = (2014, 2015, 2016, 2017, 2018)


def projects_lines() -> list[str]:
    lines = ["id,owner_id,language,year"]
    # (id, language-as-written, year); owner derived below so users overlap
    # across languages and years.
    specs = [
        (1, "Python", 2014), (2, "python", 2014), (3, "PYTHON", 2014),
        (4, "python", 2015), (5, "Python", 2015), (6, "python", 2015),
        (7, "python", 2016), (8, "Python", 2016),
        (9, "python", 2017), (10, "python", 2017),
        (11, "Python", 2018), (12, "python", 2018),
        (13, "Java", 2014), (14, "java", 2014),
        (15, "JAVA", 2015), (16, "java", 2015),
        (17, "java", 2016), (18, "Java", 2016), (19, "java", 2016),
        (20, "java", 2017), (21, "Java", 2017),
        (22, "java", 2018),
        (23, "Go", 2015), (24, "golang", 2015),
        (25, "go", 2017), (26, "GoLang", 2017), (27, "go", 2017), (28, "GO", 2017),
        (29, "go", 2018), (30, "golang", 2018),
        (31, "C++", 2014), (32, "cpp", 2015), (33, "c++", 2016),
        (34, "CPP", 2017), (35, "c++", 2017), (36, "C++", 2018),
        (37, "Ruby", 2015), (38, "ruby", 2016), (39, "ruby", 2017),
        (40, "Perl", 2016),
    ]
    for pid, lang, year in specs:
        owner = 100 + (pid * 7) % 18
        lines.append(f"{pid},{owner},{lang},{year}")
    lines += [
        "3,117,JavaScript,2015",   # duplicate project id; first row wins joins
        "\\N,118,python,2016",     # null key
        "41,\\N,java,2016",        # null key
        "42,119,,2017",            # null language
        "43,120,go,1970",          # year out of range
        "44,121,c++,2030",         # year out of range
        "45,122,python",           # wrong arity
        '46,123,"python,2018',     # unbalanced quote
    ]
    return lines


def commits_lines() -> list[str]:
    lines = ["id,author_id,committer_id,project_id,year"]
    # (project_id, year, how many commits); several repeats per (project, year)
    # so the reduce-before-join stage actually aggregates something.
    specs = [
        (1, 2014, 2), (1, 2015, 1), (1, 2016, 1),
        (2, 2014, 1), (2, 2016, 2),
        (4, 2015, 2), (4, 2017, 1),
        (7, 2016, 2), (7, 2018, 1),
        (9, 2017, 2),
        (11, 2018, 2), (12, 2018, 1),
        (13, 2014, 1), (13, 2016, 3),
        (15, 2015, 1), (15, 2018, 1),
        (17, 2016, 2),
        (20, 2017, 2), (21, 2017, 1),
        (22, 2018, 2),
        (23, 2015, 2), (23, 2016, 1),  # go 2016: commits but no new project
        (24, 2015, 1),
        (25, 2017, 2), (28, 2017, 1),
        (29, 2018, 2),
        (14, 2019, 2),                 # java 2019 on GitHub only
        (31, 2020, 1),                 # c++ skips 2019 entirely, returns 2020
        (31, 2014, 2), (31, 2016, 1),  # c++ 2016 partly from an old project
        (32, 2015, 1), (33, 2016, 1),
        (34, 2017, 2), (36, 2018, 1),
        (37, 2015, 1), (38, 2016, 1),  # ruby: cut by the top-K filter later
    ]
    rng = random.Random(211)
    cid = 7000
    for pid, year, n in specs:
        for i in range(n):
            # The first go commit of 2016 reuses a 2015 author on purpose:
            # (go, 2016) must end with zero newly seen users.
            if pid == 23 and year == 2016:
                author = 100 + (23 * 3) % 40
            else:
                author = 100 + ((pid * 3 + i * 11 + year) % 40)
            committer = "\\N" if rng.random() < 0.2 else str(200 + (cid % 17))
            lines.append(f"{cid},{author},{committer},{pid},{year}")
            cid += 1
    lines += [
        f"{cid},150,201,999,2016",      # unknown project: join miss, not a drop
        f"{cid + 1},151,\\N,998,2017",  # unknown project again
        f"{cid + 2},\\N,202,1,2015",    # null author
        f"{cid + 3},152,203,\\N,2015",  # null project
        f"{cid + 4},153,204,2,1970",    # year out of range
        f"{cid + 5},154,205,2,2030",    # year out of range
        f"{cid + 6},155,206,3",         # wrong arity
    ]
    return lines


def pull_requests_lines() -> list[str]:
    lines = ["id,head_repo_id,base_repo_id,head_commit_id,base_commit_id,pull_request_id"]
    specs = [
        (500, 1), (501, 2), (502, 4), (503, 7), (504, 9), (505, 11), (506, 3),
        (507, 13), (508, 15), (509, 17), (510, 20),
        (511, 23), (512, 25), (513, 29),
        (514, 31), (515, 34),
        (516, 37),        # ruby base: filtered with its language later
        (517, 888),       # unknown base repo: join miss once it opens
        (518, 5), (519, 12),  # 519 never gets an "opened" event
    ]
    rng = random.Random(223)
    for pr_id, base in specs:
        head = "\\N" if rng.random() < 0.3 else str(base + 50)
        lines.append(f"{pr_id},{head},{base},{7000 + pr_id},{7100 + pr_id},{pr_id - 400}")
    lines += [
        "500,\\N,13,9500,9501,100",  # duplicate pr id; first row keeps repo 1
        "\\N,60,2,9502,9503,101",    # null pr id
        "520,61,\\N,9504,9505,102",  # null base repo
        "521,62,4,9506",             # wrong arity
    ]
    return lines


def pull_request_history_lines() -> list[str]:
    lines = ["id,pull_request_id,action,actor_id,year"]
    opened = [
        (500, "opened", 2014), (501, "Opened", 2016), (502, "opened", 2015),
        (503, "OPENED", 2016), (504, "opened", 2017), (505, "opened", 2018),
        (506, "opened", 2015), (507, "opened", 2014), (508, "Opened", 2015),
        (509, "opened", 2016), (510, "opened", 2017), (511, "opened", 2015),
        (512, "opened", 2017), (513, "OPENED", 2018), (514, "opened", 2014),
        (515, "opened", 2017), (516, "opened", 2016), (517, "opened", 2016),
        (518, "opened", 2016),
    ]
    extra = [
        (501, "opened", 2015),    # double open: the earlier year must win
        (502, "reopened", 2016),  # reopen is not an open
        (500, "closed", 2015), (502, "merged", 2016), (507, "closed", 2015),
        (509, "closed", 2017), (511, "merged", 2016), (514, "closed", 2015),
        (777, "opened", 2016),    # unknown pull request
    ]
    rng = random.Random(227)
    eid = 8000
    for pr, action, year in opened + extra:
        # actor_id is optional: leave some null
        actor = str(100 + rng.randrange(18)) if rng.random() < 0.8 else "\\N"
        lines.append(f"{eid},{pr},{action},{actor},{year}")
        eid += 1
    lines += [
        f"{eid},503,\\N,104,2016",        # null action
        f"{eid + 1},504,opened,105,1970",  # year out of range
        f'{eid + 2},505,"opened,106,2017',  # unbalanced quote
    ]
    return lines


def issues_lines() -> list[str]:
    lines = ["id,repo_id,issue_id,year"]
    specs = [
        (600, 1, 2014), (601, 1, 2015), (602, 4, 2015), (603, 7, 2016),
        (604, 9, 2017), (605, 11, 2018), (618, 2, 2016), (619, 2, 2017),
        (620, 5, 2015),
        (606, 13, 2014), (607, 13, 2015), (608, 17, 2016), (609, 20, 2017),
        (621, 15, 2015),
        (610, 23, 2015), (611, 23, 2016), (612, 27, 2017), (613, 29, 2018),
        (614, 31, 2014), (615, 34, 2017), (616, 34, 2018),
        (617, 37, 2016),  # ruby
    ]
    rng = random.Random(229)
    for iid, repo, year in specs:
        ext = "\\N" if rng.random() < 0.25 else str(iid + 40000)
        lines.append(f"{iid},{repo},{ext},{year}")
    lines += [
        "622,999,\\N,2016",   # unknown repo: join miss, not a drop
        "623,\\N,90623,2016",  # null repo
        "\\N,7,90624,2016",    # null id
        "624,9,90625,2030",    # year out of range
        "625,9,90626",         # wrong arity
    ]
    return lines


def issue_events_lines() -> list[str]:
    lines = ["event_id,issue_id,action,year"]
    specs = [
        (600, "closed", 2015), (600, "subscribed", 2015),
        (602, "closed", 2016), (602, "reopened", 2017),   # pending again
        (603, "assigned", 2016),
        (606, "Closed", 2015), (606, "reopened", 2016),   # pending again
        (608, "REOPENED", 2016), (608, "closed", 2017),   # closed after reopen
        (610, "closed", 2016), (610, "reopened", 2018),   # pending again
        (614, "closed", 2017),
        (618, "closed", 2016), (618, "Reopened", 2016),   # same year: stays closed
        (621, "closed", 2016),
        (888, "closed", 2016),                            # unknown issue
    ]
    eid = 9100
    for issue, action, year in specs:
        lines.append(f"{eid},{issue},{action},{year}")
        eid += 1
    lines += [
        f"{eid},601,\\N,2016",        # null action
        f"{eid + 1},604,closed,1970",  # year out of range
        f'{eid + 2},605,"closed,2017',  # unbalanced quote
    ]
    return lines


# (language, year, question count) for the single-tag bulk of posts.
QUESTION_GRID = [
    ("python", 2014, 4), ("python", 2015, 5), ("python", 2016, 5),
    ("python", 2017, 5), ("python", 2018, 4),
    ("python", 2019, 3),  # StackOverflow only: no 2019 GitHub activity
    ("java", 2014, 3), ("java", 2015, 4), ("java", 2016, 4),
    ("java", 2017, 3), ("java", 2018, 3),
    ("go", 2015, 3), ("go", 2016, 3), ("go", 2017, 4), ("go", 2018, 3),
    ("c++", 2014, 2), ("c++", 2015, 2), ("c++", 2016, 3),
    ("c++", 2017, 2), ("c++", 2018, 2),
    ("c++", 2020, 2),     # gap year: nothing anywhere in 2019 for c++
]

TAG_FORMS = {
    "python": ["python", "<python>", "<Python><django>", "<PYTHON>", "<python><flask>"],
    "java": ["java", "<java>", "<Java><android>", "<JAVA>"],
    "go": ["<go>", "<golang>", "<Go>", "golang"],
    "c++": ["<c++>", "cpp", "<CPP><stl>", "<C++>"],
}

SCORES = [-7, -3, -1, 0, 1, 2, 3, 5, 8, 13, 21, 34]
ANSWER_COUNTS = [0, 0, 1, 1, 2, 3, 4]


def posts_lines() -> tuple[list[str], list[tuple[int, str, bool]]]:
    """Returns the post lines plus (question id, timestamp, answered) triples
    for the timestamped questions, so answers.csv can link to real ones."""
    lines = ["_Id,_OwnerUserId,_PostTypeId,_Score,_Tag,_CreationYear,_AnswerCount"]
    rng = random.Random(241)
    timestamped: list[tuple[int, str, bool]] = []
    qid = 30000

    def add_question(tag_field: str, year: int, force_negative: bool = False):
        nonlocal qid
        owner = 200 + rng.randrange(36)
        score = rng.choice(SCORES) if not force_negative else rng.choice([-9, -5])
        answers = rng.choice(ANSWER_COUNTS)
        if rng.random() < 0.6:
            month = 1 + rng.randrange(12)
            day = 1 + rng.randrange(28)
            hour = rng.randrange(24)
            when = f"{year}-{month:02d}-{day:02d} {hour:02d}:00:00"
            timestamped.append((qid, when, answers > 0))
        else:
            when = str(year)
        field = f'"{tag_field}"' if "," in tag_field else tag_field
        lines.append(f"{qid},{owner},1,{score},{field},{when},{answers}")
        qid += 1

    for lang, year, count in QUESTION_GRID:
        for i in range(count):
            # c++ 2014 leans negative so a total score below zero shows up.
            add_question(TAG_FORMS[lang][i % len(TAG_FORMS[lang])], year,
                         force_negative=(lang == "c++" and year == 2014))

    # Multi-language and duplicate-collapsing tag fields.
    for tag_field, year in [
        ("<python><java>", 2016), ("<go><c++>", 2017), ("<java><android>", 2015),
        ("<golang><go>", 2018), ("<c++><python><numpy>", 2015),
        ("<Java><JAVA>", 2017), ('<c++><boost,asio>', 2016),
    ]:
        add_question(tag_field, year)

    # Answer rows: right schema, wrong post type.
    for i in range(12):
        lang = ("python", "java", "go", "c++")[i % 4]
        year = YEARS[i % 5]
        lines.append(f"{qid},{210 + i},2,{rng.choice(SCORES)},"
                     f"<{lang}>,{year},0")
        qid += 1

    # Questions whose tags match none of the kept languages.
    for tag_field, year in [
        ("<html><css>", 2016), ("<ruby>", 2015), ("<perl><cgi>", 2016),
        ("javascript", 2017), ("<rust>", 2018), ("<ruby><rails>", 2017),
        ("<fortran>", 2014), ("<scala>", 2016),
    ]:
        owner = 200 + rng.randrange(36)
        lines.append(f"{qid},{owner},1,{rng.choice(SCORES)},"
                     f"{tag_field},{year},{rng.choice(ANSWER_COUNTS)}")
        qid += 1

    lines += [
        f"{qid},\\N,1,3,<python>,2016,1",      # null owner
        f"{qid + 1},230,1,2,\\N,2016,0",       # null tag
        f"{qid + 2},231,1,\\N,<java>,2017,1",  # null score
        f"{qid + 3},232,1,1,<go>,1970,0",      # year out of range
        f"{qid + 4},233,1,1,<c++>,2030,2",     # year out of range
        f"{qid + 5},234,1,4,<python>,2015",    # wrong arity (short)
        f"{qid + 6},235,1,4,<python>,2015,1,9",  # wrong arity (long)
        f'{qid + 7},236,1,4,"<python>,2015,1',   # unbalanced quote
        f"\\N,237,1,4,<java>,2015,1",          # null id
    ]
    return lines, timestamped


def answers_lines(timestamped: list[tuple[int, str, bool]]) -> list[str]:
    lines = ["answer_id,question_id,creation_time"]
    rng = random.Random(251)
    aid = 90000
    answered = [t for t in timestamped if t[2]]
    targets = answered[: min(20, len(answered))]
    for qid, when, _ in targets:
        base = when.replace(" ", "T")
        gap_hours = rng.choice([2, 5, 9, 14, 26, 48, 72, 90])
        lines.append(f"{aid},{qid},{_shift(base, gap_hours)}")
        aid += 1
    # Second, later answer to the first two questions: earliest must win.
    for qid, when, _ in targets[:2]:
        lines.append(f"{aid},{qid},{_shift(when.replace(' ', 'T'), 200)}")
        aid += 1
    if len(answered) > 20:
        qid, when, _ = answered[20]
        # An answer "before" the question: the response gap clamps to zero.
        lines.append(f"{aid},{qid},{_shift(when.replace(' ', 'T'), -1)}")
        aid += 1
    # A zero-_AnswerCount question with a linked answer (dump inconsistency).
    unanswered_ts = [t for t in timestamped if not t[2]]
    if unanswered_ts:
        qid, when, _ = unanswered_ts[0]
        lines.append(f"{aid},{qid},{_shift(when.replace(' ', 'T'), 30)}")
        aid += 1
    lines += [
        f"{aid},55555,2016-05-01T10:00:00Z",   # unknown question: silently unused
        f"{aid + 1},{targets[2][0]},2021-01-01T00:00:00Z",  # year out of range
        f"{aid + 2},\\N,2016-05-02T10:00:00Z",  # null question id
        f"{aid + 3},{targets[3][0]},not-a-date",  # malformed timestamp
        f"{aid + 4},{targets[4][0]}",             # wrong arity
    ]
    return lines


def _shift(iso_naive: str, hours: int) -> str:
    from datetime import datetime, timedelta
    dt = datetime.fromisoformat(iso_naive) + timedelta(hours=hours)
    return dt.isoformat()


CATEGORIES = """\
# language = category
python = scripting
java = managed
go = systems
c++ = systems
ruby = scripting
"""


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--dest", default="tests/fixtures/input",
                        help="directory to write the fixture into")
    args = parser.parse_args()
    dest = Path(args.dest)
    dest.mkdir(parents=True, exist_ok=True)

    posts, timestamped = posts_lines()
    files = {
        "projects.csv": projects_lines(),
        "commits.csv": commits_lines(),
        "pull_requests.csv": pull_requests_lines(),
        "pull_request_history.csv": pull_request_history_lines(),
        "issues.csv": issues_lines(),
        "issue_events.csv": issue_events_lines(),
        "posts.csv": posts,
        "answers.csv": answers_lines(timestamped),
    }
    for name, lines in files.items():
        (dest / name).write_text("\n".join(lines) + "\n", encoding="utf-8")
        print(f"{name}: {len(lines) - 1} data lines")
    (dest / "categories.txt").write_text(CATEGORIES, encoding="utf-8")
    print(f"categories.txt: {len(CATEGORIES.splitlines()) - 1} entries")


if __name__ == "__main__":
    main()
