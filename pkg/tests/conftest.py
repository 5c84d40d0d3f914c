from __future__ import annotations

from pathlib import Path

import pytest

from framelens import clean_article

DATA_DIR = Path(__file__).parent / "data"


def make_article(article_id="a1", title="Headline", sub="", body="", date="2024-01-15", source="fixture"):
    return clean_article(
        {
            "id": article_id,
            "url": f"https://example.org/{article_id}",
            "title": title,
            "subheadline": sub,
            "body": body,
            "publish_date": date,
            "source": source,
        }
    )


@pytest.fixture
def article_factory():
    return make_article
