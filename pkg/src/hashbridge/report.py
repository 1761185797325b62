"""Static HTML rendering of a ranked hierarchy.

Pure string templating over the assembled structure: no scripts, no
external assets, deterministic output for identical input.
"""

from __future__ import annotations

import html

from .ranking import Hierarchy

_STYLE = """
body { font-family: sans-serif; margin: 2em auto; max-width: 60em; }
h1 { border-bottom: 2px solid #444; padding-bottom: 0.2em; }
.cluster { border: 1px solid #bbb; border-radius: 4px; margin: 1em 0; padding: 0 1em 0.5em; }
.cluster h2 { font-size: 1.1em; }
.desc { color: #555; font-style: italic; }
.hashtag { margin: 0.6em 0 0.6em 1em; }
.hashtag .name { font-weight: bold; }
.meta { color: #777; font-size: 0.85em; }
ul.items { margin: 0.2em 0 0.4em 1.5em; padding: 0; }
ul.items li { margin: 0.15em 0; list-style: square; }
""".strip()


def render_report(hierarchy: Hierarchy) -> str:
    """Build the full report page as a string."""
    esc = html.escape
    parts = [
        "<!DOCTYPE html>",
        '<html lang="en">',
        "<head>",
        '<meta charset="utf-8">',
        f"<title>{esc(hierarchy.query)}</title>",
        f"<style>{_STYLE}</style>",
        "</head>",
        "<body>",
        f"<h1>Query: {esc(hierarchy.query)}</h1>",
    ]
    for rank, cluster in enumerate(hierarchy.clusters, 1):
        words = ", ".join(esc(w) for w, _ in cluster.description)
        parts.append('<div class="cluster">')
        parts.append(f"<h2>#{rank} &mdash; importance "
                     f"{cluster.importance:.6f}</h2>")
        parts.append(f'<p class="desc">{words}</p>')
        for entry in cluster.hashtags:
            parts.append('<div class="hashtag">')
            parts.append(f'<span class="name">#{esc(entry.tag)}</span> '
                         f'<span class="meta">({esc(entry.source.value)}, '
                         f"weight {entry.weight:.4f})</span>")
            parts.append('<ul class="items">')
            for item in entry.items:
                parts.append(
                    f"<li>{esc(item.text)} "
                    f'<span class="meta">[{esc(item.id)}, t={item.timestamp}, '
                    f"comments={item.comments}, "
                    f"endorsements={item.endorsements}]</span></li>")
            parts.append("</ul>")
            parts.append("</div>")
        parts.append("</div>")
    parts.extend(["</body>", "</html>"])
    return "\n".join(parts) + "\n"
