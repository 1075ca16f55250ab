#!/usr/bin/env python3
"""Regenerates data/ and tests/fixtures/.

The corpus material is a small synthetic Japanese/Chinese pair language:
Japanese clauses are verb-final with kana particles, the Chinese side is
verb-medial with its own function characters, and content words come from
a fixed concept list (half of them share characters through the kanji map).

    python3 tools/make_fixtures.py [--opencc-dir DIR]

--opencc-dir points at an OpenCC dictionary directory (JPVariants.txt,
TSCharacters.txt); without it the existing data/kanji_simplified.tsv is reused.
"""

import argparse
import gzip
import hashlib
import json
import os
import random
import shutil
import unicodedata

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
DATA = os.path.join(ROOT, "data")
FIX = os.path.join(ROOT, "tests", "fixtures")

ZH_FUNCTION = set("的了在把和很是个年然后")


def nfkc(s):
    return unicodedata.normalize("NFKC", s)


def write_text(path, text):
    os.makedirs(os.path.dirname(path), exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(text)


def write_tsv(path, rows):
    write_text(path, "".join("\t".join(r) + "\n" for r in rows))


def write_json(path, obj):
    write_text(path, json.dumps(obj, ensure_ascii=False, indent=2, sort_keys=True) + "\n")


# ---------------------------------------------------------------- char map

def cjk(c):
    return len(c) == 1 and 0x4E00 <= ord(c) <= 0x9FFF


def build_char_map(opencc_dir):
    jp = {}
    with open(os.path.join(opencc_dir, "JPVariants.txt"), encoding="utf-8") as f:
        for line in f:
            parts = line.rstrip("\n").split("\t")
            if len(parts) == 2 and cjk(parts[0]) and cjk(parts[1].split(" ")[0]):
                jp[parts[0]] = parts[1].split(" ")[0]
    ts = {}
    with open(os.path.join(opencc_dir, "TSCharacters.txt"), encoding="utf-8") as f:
        for line in f:
            parts = line.rstrip("\n").split("\t")
            if len(parts) == 2 and cjk(parts[0]) and cjk(parts[1].split(" ")[0]):
                ts[parts[0]] = parts[1].split(" ")[0]
    pairs = set()
    for trad in sorted(set(jp) | set(ts)):
        ja = jp.get(trad, trad)
        zh = ts.get(trad, trad)
        if ja != zh:
            pairs.add((ja, zh))
    return sorted(pairs)


def load_char_map():
    rows = []
    with open(os.path.join(DATA, "kanji_simplified.tsv"), encoding="utf-8") as f:
        for line in f:
            a, b = line.rstrip("\n").split("\t")
            rows.append((a, b))
    return rows


# ---------------------------------------------------------------- language

class Language:
    def __init__(self, char_map, rng, n_concepts=6000, n_lexicon=5000):
        self.rng = rng
        self.j2s = {}
        for a, b in char_map:
            self.j2s.setdefault(a, b)
        mapped = sorted(self.j2s)
        excluded = ZH_FUNCTION | set(self.j2s.values()) | set(mapped)
        plain = [chr(c) for c in range(0x4E00, 0x9FA6) if chr(c) not in excluded]
        rng.shuffle(plain)
        shared = plain[:1500]      # written the same on both sides
        ja_only = plain[1500:3500]
        zh_only = plain[3500:5500]

        kinds = ["N"] * 60 + ["V"] * 25 + ["A"] * 15
        seen_ja, seen_zh = set(), set()
        self.concepts = []
        while len(self.concepts) < n_concepts:
            kind = rng.choice(kinds)
            length = rng.choice([1, 2, 2, 2, 2, 3]) if kind == "N" else rng.choice([1, 2, 2])
            if rng.random() < 0.5:
                ja = "".join(rng.choice(mapped) if rng.random() < 0.5 else rng.choice(shared)
                             for _ in range(length))
                zh = "".join(self.j2s.get(c, c) for c in ja)
            else:
                ja = "".join(rng.choice(ja_only) for _ in range(length))
                zh = "".join(rng.choice(zh_only) for _ in range(rng.choice([1, 2, 2, 3])))
            if ja in seen_ja or zh in seen_zh:
                continue
            seen_ja.add(ja)
            seen_zh.add(zh)
            self.concepts.append((kind, ja, zh))
        order = list(range(n_concepts))
        rng.shuffle(order)
        self.in_lexicon = set(order[:n_lexicon])
        self.by_kind = {k: [i for i, c in enumerate(self.concepts) if c[0] == k] for k in "NVA"}
        self.weights = {k: [1.0 / (r + 10) for r in range(len(v))] for k, v in self.by_kind.items()}

    def lexicon_rows(self):
        return [(self.concepts[i][1], self.concepts[i][2]) for i in sorted(self.in_lexicon)]

    def word(self, kind):
        i = self.rng.choices(self.by_kind[kind], weights=self.weights[kind])[0]
        return self.concepts[i][1], self.concepts[i][2]

    def clause(self):
        r = self.rng
        n1, n2 = self.word("N"), self.word("N")
        v, a = self.word("V"), self.word("A")
        num = str(r.randint(1, 2030))
        t = r.randrange(6)
        if t == 0:
            return (f"{n1[0]}は{n2[0]}を{v[0]}しました", f"{n1[1]}{v[1]}了{n2[1]}")
        if t == 1:
            return (f"{n1[0]}で{n2[0]}が{v[0]}します", f"在{n1[1]}{n2[1]}{v[1]}")
        if t == 2:
            return (f"{n1[0]}の{n2[0]}は{a[0]}です", f"{n1[1]}的{n2[1]}很{a[1]}")
        if t == 3:
            n3 = self.word("N")
            return (f"{a[0]}な{n1[0]}と{n3[0]}を{v[0]}します", f"{v[1]}{a[1]}的{n1[1]}和{n3[1]}")
        if t == 4:
            return (f"{num}年に{n1[0]}は{n2[0]}に{v[0]}しました", f"{num}年{n1[1]}在{n2[1]}{v[1]}了")
        return (f"{n1[0]}は{num}個の{n2[0]}を{v[0]}します", f"{n1[1]}{v[1]}{num}个{n2[1]}")

    def sentence(self):
        ja, zh = self.clause()
        if self.rng.random() < 0.35:
            ja2, zh2 = self.clause()
            ja, zh = f"{ja}、そして{ja2}", f"{zh}，然后{zh2}"
        return nfkc(ja + "。"), nfkc(zh + "。")

    def title(self):
        n1, n2 = self.word("N"), self.word("N")
        return nfkc(f"{n1[0]}の{n2[0]}について"), nfkc(f"关于{n1[1]}的{n2[1]}")


# ---------------------------------------------------------------- snapshots

def write_snapshot(dirpath, pages):
    """pages: list of (url, content_type, body_str, status)."""
    if os.path.isdir(dirpath):
        shutil.rmtree(dirpath)
    os.makedirs(dirpath)
    lines = []
    for i, (url, ctype, body, status) in enumerate(pages, 1):
        name = "%06d.html" % i
        with open(os.path.join(dirpath, name), "wb") as f:
            f.write(body.encode("utf-8"))
        entry = {"file": name, "url": url, "content_type": ctype}
        if status != 200:
            entry["status"] = status
        lines.append(json.dumps(entry, ensure_ascii=False))
    write_text(os.path.join(dirpath, "manifest.jsonl"), "\n".join(lines) + "\n")


def page(lang, title, nav, paragraphs, footer_links=(), links=(), table_rows=None):
    out = ['<!DOCTYPE html>', f'<html lang="{lang}"><head><meta charset="utf-8">',
           f'<title>{title}</title></head>', '<body>']
    if nav:
        out.append('<div class="nav">' + " | ".join(f'<a href="{h}">{t}</a>' for h, t in nav) + "</div>")
    for para in paragraphs:
        out.append("<p>" + "".join(para) + "</p>")
    if table_rows:
        out.append("<table>" + "".join(f"<tr><td>{r}</td></tr>" for r in table_rows) + "</table>")
    if links:
        out.append("<ul>" + "".join(f'<li><a href="{h}">{t}</a></li>' for h, t in links) + "</ul>")
    if footer_links:
        out.append('<div class="footer">Copyright 2024 ' +
                   " ".join(f'<a href="{h}">link</a>' for h in footer_links) + "</div>")
    out.append("</body></html>")
    return "\n".join(out) + "\n"


def paragraphs_of(sentences, rng):
    paras, i = [], 0
    while i < len(sentences):
        k = rng.randint(2, 4)
        paras.append(sentences[i:i + k])
        i += k
    return paras


# ---------------------------------------------------------------- fixtures

def make_e2e(lang, rng):
    host = "http://www.nicchu-shoji.co.jp"
    names = ["", "about.html", "history.html", "products.html", "services.html",
             "access.html", "quality.html", "partners.html", "faq.html", "contact.html"]
    nav_ja = [("/ja/", "ホーム"), ("/ja/about.html", "会社案内"), ("/ja/contact.html", "お問い合わせ")]
    nav_zh = [("/zh/", "首页"), ("/zh/about.html", "公司介绍"), ("/zh/contact.html", "联系我们")]
    offsite = ["http://www.partner-example.com/", "http://cdn.example-assets.net/logo.html"]
    decoys_ja = ["campaign.html", "blog.html"]
    decoys_zh = ["jobs.html"]
    gold = []
    pages = [(host + "/robots.txt", "text/plain", "User-agent: *\nDisallow: /private/\n", 200)]
    extra_pages = {2, 5, 8}
    for idx, name in enumerate(names):
        ti = lang.title()
        sents = [lang.sentence() for _ in range(19)]
        gold.append(ti)
        gold.extend(sents)
        ja_sents = [s[0] for s in sents]
        zh_sents = [s[1] for s in sents]
        if idx in extra_pages:
            ja_sents.insert(rng.randint(3, 15), lang.sentence()[0])
        ja_links = [("/zh/" + name, "中文")]
        zh_links = [("/ja/" + name, "日本語")]
        if idx == 0:
            ja_links += [("/ja/" + n, n) for n in names[1:] + decoys_ja]
            zh_links += [("/zh/" + n, n) for n in names[1:] + decoys_zh]
        pages.append((host + "/ja/" + name, "text/html; charset=utf-8",
                      page("ja", ti[0], nav_ja, paragraphs_of(ja_sents, rng), offsite, ja_links), 200))
        pages.append((host + "/zh/" + name, "text/html; charset=utf-8",
                      page("zh", ti[1], nav_zh, paragraphs_of(zh_sents, rng), offsite, zh_links), 200))
    for name in decoys_ja:
        rows = [lang.sentence()[0] for _ in range(5)]
        pages.append((host + "/ja/" + name, "text/html; charset=utf-8",
                      page("ja", lang.title()[0], None, [], (), [("/ja/", "戻る")], rows), 200))
    for name in decoys_zh:
        rows = [lang.sentence()[1] for _ in range(5)]
        pages.append((host + "/zh/" + name, "text/html; charset=utf-8",
                      page("zh", lang.title()[1], None, [], (), [("/zh/", "返回")], rows), 200))
    base = os.path.join(FIX, "e2e")
    write_snapshot(os.path.join(base, "site"), pages)
    # Served by the snapshot fetcher but never reachable through the domain filter.
    write_snapshot(os.path.join(base, "offsite"),
                   [(u, "text/html", page("en", "Partner", None, [["Partner site."]]), 200) for u in offsite])
    write_tsv(os.path.join(base, "gold_pairs.tsv"), gold)
    write_tsv(os.path.join(base, "submissions.tsv"), [(host + "/ja/", host + "/zh/", "worker-001")])
    write_json(os.path.join(base, "manifest.json"), {
        "host": "nicchu-shoji.co.jp", "true_page_pairs": len(names), "true_sentence_pairs": len(gold),
        "decoy_pages": len(decoys_ja) + len(decoys_zh), "off_domain_links": offsite,
        "untranslated_ja_sentences": len(extra_pages)})
    write_text(os.path.join(base, "e2e.ini"), """[pipeline]
out_dir = out
seed = 7

[inputs]
submissions = submissions.tsv
lexicon = ../../../data/starter_lexicon.tsv
char_map = ../../../data/kanji_simplified.tsv

[crawler]
max_pages = 200
per_host_delay_ms = 1000

[filter]
train = ../filter/train.tsv
""")


ARCHIVE_HOSTS = [
    # (record host(s), ja pages, zh pages, other pages)
    (["kanpo-boeki.com"], 10, 10, 0),
    (["www.sakura-travel.jp", "cn.sakura-travel.jp"], 12, 8, 0),
    (["tokyo-news.co.jp"], 20, 2, 0),
    (["www.shanghai-trade.cn"], 6, 14, 0),
    (["example-blog.net"], 8, 5, 5),
]


def make_archive(lang, rng):
    records, expected = [], {}
    for hosts, n_ja, n_zh, n_other in ARCHIVE_HOSTS:
        reg = hosts[0].split(".", 1)[1] if hosts[0].startswith(("www.", "cn.")) else hosts[0]
        stats = {"bytes_ja": 0, "bytes_zh": 0, "bytes_other": 0, "page_count": 0}
        plan = ["ja"] * n_ja + ["zh"] * n_zh + ["other"] * n_other
        for i, kind in enumerate(plan):
            h = hosts[0] if kind != "zh" or len(hosts) == 1 else hosts[1]
            n = rng.randint(4, 14)
            if kind == "other":
                text = " ".join(rng.choice(["This page is in English.", "Travel notes and photos.",
                                            "Contact us for details."]) for _ in range(n))
            else:
                text = "".join(lang.sentence()[0 if kind == "ja" else 1] for _ in range(n))
            body = f'<html><head><meta charset="utf-8"></head><body><p>{text}</p></body></html>'
            records.append((f"http://{h}/{kind}/page{i:02d}.html", body))
            stats["bytes_" + kind] += len(text.encode("utf-8"))
            stats["page_count"] += 1
        expected[reg] = stats
    rng.shuffle(records)

    base = os.path.join(FIX, "archive")
    os.makedirs(base, exist_ok=True)
    with open(os.path.join(base, "archive.warc.gz"), "wb") as raw:
        for i, (url, body) in enumerate(records):
            payload = ("HTTP/1.1 200 OK\r\nContent-Type: text/html; charset=utf-8\r\n\r\n" + body).encode("utf-8")
            head = ("WARC/1.0\r\nWARC-Type: response\r\n"
                    f"WARC-Record-ID: <urn:uuid:00000000-0000-0000-0000-{i:012d}>\r\n"
                    f"WARC-Target-URI: {url}\r\nContent-Type: application/http; msgtype=response\r\n"
                    f"Content-Length: {len(payload)}\r\n\r\n").encode("utf-8")
            raw.write(gzip.compress(head + payload + b"\r\n\r\n", mtime=0))

    def balance(s):
        hi = max(s["bytes_ja"], s["bytes_zh"])
        return min(s["bytes_ja"], s["bytes_zh"]) / hi if hi else 0.0

    criteria = {"min_bytes": 2000, "min_balance": 0.3, "limit": 3}
    kept = [h for h, s in expected.items()
            if min(s["bytes_ja"], s["bytes_zh"]) >= criteria["min_bytes"] and balance(s) >= criteria["min_balance"]]
    kept.sort(key=lambda h: (-(expected[h]["bytes_ja"] + expected[h]["bytes_zh"]), h))
    write_json(os.path.join(base, "manifest.json"), {
        "records": len(records), "hosts": expected, "selection_criteria": criteria,
        "selected": kept[:criteria["limit"]]})

    # Small mirror of kanpo-boeki.com for crawl-and-mine runs from archive discovery.
    host = "http://kanpo-boeki.com"
    pages = [(host + "/", "text/html", page("ja", "Kanpo", None, [],
                                            links=[("/ja/", "日本語"), ("/zh/", "中文")]), 200)]
    names = ["", "a.html", "b.html", "c.html"]
    for name in names:
        ti = lang.title()
        sents = [lang.sentence() for _ in range(12)]
        links_ja = [("/ja/" + n, n) for n in names if n != name]
        links_zh = [("/zh/" + n, n) for n in names if n != name]
        pages.append((host + "/ja/" + name, "text/html",
                      page("ja", ti[0], None, paragraphs_of([s[0] for s in sents], rng), links=links_ja), 200))
        pages.append((host + "/zh/" + name, "text/html",
                      page("zh", ti[1], None, paragraphs_of([s[1] for s in sents], rng), links=links_zh), 200))
    write_snapshot(os.path.join(FIX, "snapshots", "kanpo-boeki.com"), pages)


def make_crawl30(rng):
    host = "http://www.crawl-test.jp"
    offsite = ["http://offsite-a.com/", "http://www.offsite-b.net/x.html", "http://cdn.other-site.org/y.html"]
    urls = [host + "/"] + [f"{host}/p{i:02d}.html" for i in range(1, 30)]
    links = {u: [] for u in urls}
    for i in range(1, 30):
        parent = urls[(i - 1) // 3]
        links[parent].append(urls[i])
    for i in range(1, 30, 4):
        links[urls[i]].append(urls[0])
    links[urls[4]].append(offsite[0])
    links[urls[11]].append(offsite[1])
    links[urls[23]].append(offsite[2])
    pages = []
    for i, u in enumerate(urls):
        items = "".join(f'<li><a href="{l}">link</a></li>' for l in links[u])
        body = (f'<html><head><meta charset="utf-8"><title>page {i}</title></head><body>'
                f"<p>これはテストページ{i}です。</p><ul>{items}</ul></body></html>\n")
        pages.append((u, "text/html", body, 200))

    order, seen, queue = [], {urls[0]}, [urls[0]]
    while queue:
        u = queue.pop(0)
        order.append(u)
        for l in links[u]:
            if l in seen or l in offsite:
                continue
            seen.add(l)
            queue.append(l)
    base = os.path.join(FIX, "crawl30")
    write_snapshot(os.path.join(base, "site"), pages)
    write_snapshot(os.path.join(base, "offsite"),
                   [(u, "text/html", "<html><body><p>offsite</p></body></html>\n", 200) for u in offsite])
    write_json(os.path.join(base, "links.json"), {"seed": urls[0], "pages": len(urls),
                                                  "off_domain": offsite, "bfs_order": order})


def make_urlpairs(lang, rng):
    rows, pages, expected = [], [], []
    for i in range(10):
        host = f"http://www.site{i:02d}-example.jp"
        ja_url, zh_url = host + "/ja/", host + "/zh/"
        ja_text = "".join(lang.sentence()[0] for _ in range(4))
        zh_text = "".join(lang.sentence()[1] for _ in range(4))
        status = "VALID"
        if i == 3:
            zh_url = ja_url
            status = "ERROR(SAME_URL)"
        if i == 7:
            ja_text = zh_text
            status = "ERROR(WRONG_LANGUAGE)"
        pages.append((ja_url, "text/html", page("ja", "top", None, [[ja_text]]), 200))
        if zh_url != ja_url:
            pages.append((zh_url, "text/html", page("zh", "top", None, [[zh_text]]), 200))
        rows.append((ja_url, zh_url, f"worker-{i % 3}"))
        expected.append(status)
    base = os.path.join(FIX, "urlpairs")
    write_snapshot(os.path.join(base, "pages"), pages)
    write_tsv(os.path.join(base, "submissions.tsv"), rows)
    write_json(os.path.join(base, "expected.json"), {"valid": 8, "errors": 2, "statuses": expected})


def make_reduce(lang, rng):
    words = [(c[1], c[2]) for c in lang.concepts if len(c[1]) >= 2 and len(c[2]) >= 2][:730]
    ja_vocab = {w[0] for w in words}
    zh_vocab = {w[1] for w in words}
    raw = list(words)
    seen = set(raw)
    while len(raw) < 1000:
        a, b = rng.sample(words, 2)
        mode = rng.randrange(3)
        ja = a[0] + b[0] if mode != 1 else a[0]
        zh = a[1] + b[1] if mode != 0 else a[1]
        if ja in ja_vocab and zh in zh_vocab:
            continue
        if (ja, zh) in seen:
            continue
        seen.add((ja, zh))
        raw.append((ja, zh))
    rng.shuffle(raw)
    used = set("".join(w[0] + w[1] for w in words))
    char_rows = [(a, b) for a, b in load_char_map() if a not in used and b not in used]
    char_rows = rng.sample(char_rows, 60)
    base = os.path.join(FIX, "lexicon")
    write_tsv(os.path.join(base, "raw_dictionary.tsv"), raw)
    write_text(os.path.join(base, "vocab_ja.txt"), "\n".join(sorted(ja_vocab)) + "\n")
    write_text(os.path.join(base, "vocab_zh.txt"), "\n".join(sorted(zh_vocab)) + "\n")
    write_tsv(os.path.join(base, "char_map.tsv"), char_rows)
    write_json(os.path.join(base, "manifest.json"), {"raw_entries": len(raw), "single_token": 730,
                                                     "char_map": 60, "augmented": 790})


def make_embedding(lang):
    pairs = [lang.sentence() for _ in range(3)]
    u = [100, 0, 0, 0, 0, 0]
    planted = {"0.69": [69, 72, 7, 2, 1, 1], "0.70": [70, 71, 7, 3, 1, 0], "0.71": [71, 70, 7, 3, 1, 0]}
    lines, rows = [], []
    for (ja, zh), (label, v) in zip(pairs, planted.items()):
        assert sum(x * x for x in v) == 10000
        lines.append(hashlib.sha256(ja.encode()).hexdigest() + "\t" + " ".join(map(str, u)))
        lines.append(hashlib.sha256(zh.encode()).hexdigest() + "\t" + " ".join(map(str, v)))
        rows.append((ja, zh, label))
    base = os.path.join(FIX, "embedding")
    write_text(os.path.join(base, "vectors.tsv"), "\n".join(lines) + "\n")
    write_tsv(os.path.join(base, "pairs.tsv"), rows)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--opencc-dir")
    args = ap.parse_args()
    if args.opencc_dir:
        write_tsv(os.path.join(DATA, "kanji_simplified.tsv"), build_char_map(args.opencc_dir))

    rng = random.Random(20240611)
    lang = Language(load_char_map(), rng)
    write_tsv(os.path.join(DATA, "starter_lexicon.tsv"), lang.lexicon_rows())
    write_tsv(os.path.join(FIX, "filter", "train.tsv"), [lang.sentence() for _ in range(1000)])
    make_e2e(lang, rng)
    make_archive(lang, rng)
    make_crawl30(rng)
    make_urlpairs(lang, rng)
    make_reduce(lang, rng)
    make_embedding(lang)


if __name__ == "__main__":
    main()
