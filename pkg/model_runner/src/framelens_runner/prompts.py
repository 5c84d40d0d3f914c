"""Prompt templates for the instruction-tuned backends.

Templates are fixed strings with named slots; rendering validates that every
slot value actually appears in the output so a silently unfilled template
cannot reach a backend.
"""

from __future__ import annotations

from dataclasses import dataclass


class PromptError(ValueError):
    pass


@dataclass(frozen=True)
class PromptTemplate:
    name: str
    template: str
    slots: tuple[str, ...]
    schema_keys: tuple[str, ...]

    def render(self, **values: str) -> str:
        missing = [slot for slot in self.slots if slot not in values]
        if missing:
            raise PromptError(f"{self.name}: missing slot values {missing}")
        rendered = self.template.format(**{slot: values[slot] for slot in self.slots})
        for slot in self.slots:
            if values[slot] and values[slot] not in rendered:
                raise PromptError(f"{self.name}: slot {slot!r} did not survive substitution")
        if "{" + self.slots[0] + "}" in rendered:
            raise PromptError(f"{self.name}: unfilled slot remains in rendered prompt")
        return rendered


GEMINI_CLASSIFY = PromptTemplate(
    name="gemini_classify",
    slots=("title", "excerpt"),
    schema_keys=("sentiment", "supporting_sentences"),
    template=(
        "You are analyzing news articles about human-elephant conflict.\n"
        "Article Title: {title}\n"
        "Article Text: {excerpt}\n"
        "Task:\n"
        "Determine how elephants are portrayed.\n"
        "Use the following criteria:\n"
        '- NEGATIVE: Elephants portrayed using hostile language (e.g., "attacked", "invaded", "menace").\n'
        "- NEUTRAL: Balanced reporting without emotionally charged terms.\n"
        "- POSITIVE: Reporting that emphasizes ecological context, habitat loss, or empathy.\n"
        "Output strictly enforced as JSON:\n"
        '{{"sentiment": ..., "supporting_sentences": [...]}}'
    ),
)

QWEN_CLASSIFY = PromptTemplate(
    name="qwen_classify",
    slots=("excerpt",),
    schema_keys=("classification", "confidence", "reasoning"),
    template=(
        "You are an expert news analyst specializing in Human-Elephant Conflict (HEC).\n"
        "Analyze the following news article and classify the portrayal of the elephant.\n"
        "CLASSIFICATION DEFINITIONS:\n"
        "- Negative: The article portrays elephants as a threat, 'killer', 'menace', "
        "or focuses on conflict/damage/fear.\n"
        "- Positive: The article portrays elephants with sympathy, reverence (Ganesh), "
        "focuses on rescue/conservation, or is a lighthearted story.\n"
        "- Neutral: Purely factual reporting (e.g., census numbers, policy updates) "
        "without emotional language.\n"
        "Article:\n"
        "{excerpt}\n"
        "Output required as JSON with keys: classification, confidence, reasoning. "
        "Reasoning must be one short sentence."
    ),
)

RELEVANCE = PromptTemplate(
    name="relevance",
    slots=("excerpt",),
    schema_keys=("relevance", "location"),
    template=(
        "Analyze the following news article regarding possible human-elephant conflict.\n"
        "Task 1: Determine if the article describes human-elephant conflict. "
        'Respond with either "Relevant" or "Not Relevant".\n'
        "Task 2: Extract up to five location names (state, district, village).\n"
        "Respond exactly in the format:\n"
        "Relevance: <Relevant/Not Relevant>\n"
        "Location: <semicolon-separated list or 'Location not specified'>\n"
        "Article:\n"
        "{excerpt}"
    ),
)


def render_relevance_prompt(article: dict) -> str:
    """Relevance prompt for a corpus article record (title + body text)."""
    parts = [article.get("title", ""), article.get("subheadline", ""), article.get("body", "")]
    excerpt = "\n".join(p for p in parts if p)
    return RELEVANCE.render(excerpt=excerpt)
