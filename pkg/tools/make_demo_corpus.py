"""Build the twelve-site demonstration corpus under tests/data/demo_corpus.

Each site exercises a different slice of the rubric, so batch-auditing the
corpus touches every automated checker, the answer-file merge, and every
classification outcome.  Snapshots are assembled with a fixed fetch
timestamp, so rerunning this script reproduces the corpus byte for byte.

Run from the repository root:

    python3 tools/make_demo_corpus.py            # rebuild snapshots/answers
    python3 tools/make_demo_corpus.py --golden   # also refresh the expected
                                                 # aggregate output
"""

from __future__ import annotations

import argparse
import contextlib
import io
import json
import shutil
import tempfile
from pathlib import Path

from wiaudit.cli import main as cli_main
from wiaudit.snapshot import DiscoveredVia, ResourceDraft, build_snapshot, store_snapshot

CORPUS_DIR = Path(__file__).resolve().parents[1] / "tests" / "data" / "demo_corpus"

PLAIN_HEADERS = (("Content-Type", "text/html; charset=utf-8"),)
PHP_HEADERS = (
    ("Content-Type", "text/html; charset=utf-8"),
    ("X-Powered-By", "PHP/8.2.7"),
)


def page(title: str, body: str, head: str = "", doctype: str = "") -> str:
    return (
        f"{doctype}<html><head><title>{title}</title>{head}</head>"
        f"<body>{body}</body></html>"
    )


def rss_feed(site: str, topic: str) -> str:
    items = "".join(
        f"<item><title>{topic} notice {n}</title>"
        f"<link>http://{site}/news/{n}</link></item>"
        for n in (1, 2, 3)
    )
    return (
        '<?xml version="1.0" encoding="utf-8"?>'
        f'<rss version="2.0"><channel><title>{topic}</title>'
        f"<link>http://{site}/</link>"
        f"<description>Announcements from the {topic.lower()} desk.</description>"
        f"{items}</channel></rss>"
    )


def atom_feed(site: str, topic: str) -> str:
    entries = "".join(
        f"<entry><id>http://{site}/minutes/{n}</id>"
        f"<title>{topic} session {n}</title>"
        f"<updated>2026-0{n}-01T09:00:00Z</updated></entry>"
        for n in (1, 2)
    )
    return (
        '<?xml version="1.0" encoding="utf-8"?>'
        '<feed xmlns="http://www.w3.org/2005/Atom">'
        f"<id>http://{site}/minutes</id><title>{topic} minutes</title>"
        f"<updated>2026-02-01T09:00:00Z</updated>{entries}</feed>"
    )


def rdf_doc(site: str, subject: str) -> str:
    return (
        '<?xml version="1.0" encoding="utf-8"?>'
        '<rdf:RDF xmlns:rdf="http://www.w3.org/1999/02/22-rdf-syntax-ns#"'
        ' xmlns:dc="http://purl.org/dc/elements/1.1/">'
        f'<rdf:Description rdf:about="http://{site}/dataset">'
        f"<dc:title>{subject}</dc:title><dc:creator>Records office</dc:creator>"
        "</rdf:Description></rdf:RDF>"
    )


# The iframe keeps the mobile suite failing wherever a profile does not
# include the mobile criterion; everything else on these pages is inert.
LEGACY_BODY = "<p>Counter hours are posted at the entrance.</p><iframe src='/map.html'></iframe>"


def extra(path: str, body: str, media_type: str, via: DiscoveredVia) -> dict:
    return {"path": path, "body": body, "media_type": media_type, "via": via}


SITES = [
    {
        # Nothing satisfied: static page, no technology or storage signals.
        "name": "site01",
        "url": "http://site01.example/",
        "headers": PLAIN_HEADERS,
        "html": page("Alder Creek levee district", LEGACY_BODY),
        "extras": [],
        "answers": None,
    },
    {
        # Dynamic technology alone: 0.15, the most common profile.
        "name": "site02",
        "url": "http://site02.example/",
        "headers": PHP_HEADERS,
        "html": page("Borough of Kettle Falls", LEGACY_BODY),
        "extras": [],
        "answers": None,
    },
    {
        # Technology + RSS feed + confirmed machine-readable storage.
        "name": "site03",
        "url": "http://site03.example/",
        "headers": PHP_HEADERS,
        "html": page(
            "Maple County assessor",
            LEGACY_BODY
            + "<form method='post' action='/parcel-search.php'>"
            "<input name='parcel'></form>",
            head="<link rel='alternate' type='application/rss+xml'"
            " href='/news/feed.xml'>",
        ),
        "extras": [
            extra(
                "/news/feed.xml",
                rss_feed("site03.example", "Assessment"),
                "application/rss+xml",
                DiscoveredVia.FEED_LINK,
            )
        ],
        "answers": "\n".join(
            [
                "site http://site03.example/",
                "assessor auditor-1",
                "date 2026-03-02",
                'answer C7_1 1 "parcel queries land in the assessment database"',
                'answer C1 0 "no levy calendar or rate notices published"',
            ]
        ),
    },
    {
        # Technology + documented machine interface (manual C5).
        "name": "site04",
        "url": "http://site04.example/",
        "headers": PHP_HEADERS,
        "html": page("Port of Gray Harbor", LEGACY_BODY),
        "extras": [],
        "answers": "\n".join(
            [
                "site http://site04.example/",
                "assessor auditor-1",
                "date 2026-03-02",
                'answer C5 1 "moorage feed documented on the \\"open data\\" page"',
            ]
        ),
    },
    {
        # Technology + services handled on the site itself (manual C3_1).
        "name": "site05",
        "url": "http://site05.example/",
        "headers": PHP_HEADERS,
        "html": page("City of Larkspur permits", LEGACY_BODY),
        "extras": [],
        "answers": "\n".join(
            [
                "site http://site05.example/",
                "assessor auditor-2",
                "date 2026-03-04",
                'answer C3_1 1 "fence permits are applied for and issued on the site"',
            ]
        ),
    },
    {
        # Technology + a page that passes every enabled mobile test.
        "name": "site06",
        "url": "http://site06.example/",
        "headers": PHP_HEADERS,
        "html": page(
            "Foothill transit district",
            "<p>Dial-a-ride bookings close at noon.</p>",
            head="<meta charset='utf-8'>",
            doctype="<!DOCTYPE html>",
        ),
        "extras": [],
        "answers": None,
    },
    {
        # Technology + Atom feed + confirmed human-readable storage.
        "name": "site07",
        "url": "http://site07.example/",
        "headers": PHP_HEADERS,
        "html": page(
            "Juniper irrigation board",
            LEGACY_BODY + "<p>Write to <a href='mailto:clerk@site07.example'>"
            "the clerk</a> for allotment records.</p>",
            head="<link rel='alternate' type='application/atom+xml'"
            " href='/minutes/feed.atom'>",
        ),
        "extras": [
            extra(
                "/minutes/feed.atom",
                atom_feed("site07.example", "Board"),
                "application/atom+xml",
                DiscoveredVia.FEED_LINK,
            )
        ],
        "answers": "\n".join(
            [
                "site http://site07.example/",
                "assessor auditor-2",
                "date 2026-03-04",
                'answer C7_2 1 "allotment ledgers are mailed out as scanned PDFs"',
            ]
        ),
    },
    {
        # Technology + linked RDF metadata.
        "name": "site08",
        "url": "http://site08.example/",
        "headers": PHP_HEADERS,
        "html": page(
            "Cedarville records office",
            LEGACY_BODY,
            head="<link rel='alternate' type='application/rdf+xml'"
            " href='/catalog.rdf'>",
        ),
        "extras": [
            extra(
                "/catalog.rdf",
                rdf_doc("site08.example", "Deed index"),
                "application/rdf+xml",
                DiscoveredVia.ALTERNATE_LINK,
            )
        ],
        "answers": None,
    },
    {
        # Services through a third-party application only (manual C3_2):
        # lands exactly on the acquisition boundary of 1.00.
        "name": "site09",
        "url": "http://site09.example/",
        "headers": PLAIN_HEADERS,
        "html": page("Township of Reed Hollow", LEGACY_BODY),
        "extras": [],
        "answers": "\n".join(
            [
                "site http://site09.example/",
                "assessor auditor-1",
                "date 2026-03-09",
                'answer C3_2 1 "dog licences are handled in the county portal app"',
            ]
        ),
    },
    {
        # Technology + published information + feedback channel (manual C1, C4).
        "name": "site10",
        "url": "http://site10.example/",
        "headers": PHP_HEADERS,
        "html": page("Millbrook water utility", LEGACY_BODY),
        "extras": [],
        "answers": "\n".join(
            [
                "site http://site10.example/",
                "assessor auditor-2",
                "date 2026-03-09",
                'answer C1 1 "outage bulletins and rate sheets posted monthly"',
                'answer C4 1 "leak report form returns a tracking number"',
            ]
        ),
    },
    {
        # Technology + a semantically structured page (title plus outline).
        "name": "site11",
        "url": "http://site11.example/",
        "headers": PHP_HEADERS,
        "html": page(
            "Oakum Bay harbormaster",
            "<h1>Moorage</h1><p>Slips by length.</p>"
            "<h2>Transient berths</h2><p>48 hour limit.</p>"
            "<iframe src='/tides.html'></iframe>",
        ),
        "extras": [],
        "answers": None,
    },
    {
        # Everything except third-party services: the corpus top site, 5.00.
        "name": "site12",
        "url": "http://site12.example/",
        "headers": PHP_HEADERS,
        "html": page(
            "City of Winton Mills",
            "<h1>Services</h1><p>Most permits complete online.</p>"
            "<h2>Payments</h2><p>Card or account transfer.</p>"
            "<form method='post' action='/pay.php'><input name='invoice'></form>"
            "<p><a href='mailto:records@site12.example'>Records requests</a></p>",
            head="<meta charset='utf-8'>"
            "<meta name='description' content='Permits, payments, and records"
            " for Winton Mills residents.'>"
            "<link rel='alternate' type='application/rss+xml' href='/news.xml'>"
            "<link rel='alternate' type='application/rdf+xml' href='/open-data.rdf'>",
            doctype="<!DOCTYPE html>",
        ),
        "extras": [
            extra(
                "/news.xml",
                rss_feed("site12.example", "City hall"),
                "application/rss+xml",
                DiscoveredVia.FEED_LINK,
            ),
            extra(
                "/open-data.rdf",
                rdf_doc("site12.example", "Service catalogue"),
                "application/rdf+xml",
                DiscoveredVia.ALTERNATE_LINK,
            ),
        ],
        "answers": "\n".join(
            [
                "site http://site12.example/",
                "assessor auditor-1",
                "date 2026-03-11",
                'answer C1 1 "agendas, budgets, and tax rolls all published"',
                'answer C3_1 1 "permits and payments complete on the site"',
                'answer C4 1 "service desk form with ticketed replies"',
                'answer C5 1 "REST endpoints documented under /open-data"',
                'answer C7_1 1 "payments and permits write to the city ERP"',
                'answer C7_2 1 "records requests answered with scanned files"',
            ]
        ),
    },
]


def build_site(profile: dict, snapshots_dir: Path) -> None:
    url = profile["url"]
    drafts = [
        ResourceDraft(
            url=url,
            body=profile["html"].encode("utf-8"),
            media_type="text/html; charset=utf-8",
            headers=profile["headers"],
            via=DiscoveredVia.ROOT,
        )
    ]
    for item in profile["extras"]:
        drafts.append(
            ResourceDraft(
                url=url.rstrip("/") + item["path"],
                body=item["body"].encode("utf-8"),
                media_type=item["media_type"],
                headers=(("Content-Type", item["media_type"]),),
                via=item["via"],
            )
        )
    snapshot = build_snapshot(url, drafts)
    store_snapshot(snapshot, snapshots_dir / profile["name"], overwrite=True)


def write_golden(corpus_dir: Path) -> None:
    with tempfile.TemporaryDirectory() as tmp:
        out = Path(tmp) / "corpus"
        stdout = io.StringIO()
        with contextlib.redirect_stdout(stdout):
            code = cli_main(["batch", str(corpus_dir / "corpus.txt"), "--out", str(out)])
        if code != 0:
            raise SystemExit(f"batch over the demo corpus failed:\n{stdout.getvalue()}")
        stdout = io.StringIO()
        with contextlib.redirect_stdout(stdout):
            code = cli_main(["aggregate", str(out)])
        if code != 0:
            raise SystemExit("aggregate over the demo corpus failed")
        (corpus_dir / "expected").mkdir(exist_ok=True)
        (corpus_dir / "expected" / "aggregate.json").write_text(
            stdout.getvalue(), encoding="utf-8"
        )


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument(
        "--golden",
        action="store_true",
        help="also regenerate expected/aggregate.json",
    )
    args = parser.parse_args()

    snapshots_dir = CORPUS_DIR / "snapshots"
    answers_dir = CORPUS_DIR / "answers"
    if snapshots_dir.exists():
        shutil.rmtree(snapshots_dir)
    answers_dir.mkdir(parents=True, exist_ok=True)

    manifest_lines = ["# Twelve-site demonstration corpus; paths are relative"]
    for profile in SITES:
        build_site(profile, snapshots_dir)
        entry = f"snapshots/{profile['name']}"
        if profile["answers"]:
            answers_path = answers_dir / f"{profile['name']}.answers"
            answers_path.write_text(profile["answers"] + "\n", encoding="utf-8")
            entry += f" answers/{profile['name']}.answers"
        manifest_lines.append(entry)
    (CORPUS_DIR / "corpus.txt").write_text(
        "\n".join(manifest_lines) + "\n", encoding="utf-8"
    )
    print(f"built {len(SITES)} snapshots under {CORPUS_DIR}")

    if args.golden:
        write_golden(CORPUS_DIR)
        print("refreshed expected/aggregate.json")


if __name__ == "__main__":
    main()
