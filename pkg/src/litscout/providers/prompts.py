"""Prompt templates and deterministic request construction.

Templates are fixed text with named ``{placeholder}`` slots. Rendering
substitutes only the declared names (several templates contain literal
JSON braces), and every declared slot must be bound. The request hash is
the replay-fixture key: same template, same variables, same hash.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from enum import Enum

from litscout.errors import ValidationFailure


class TemplateId(str, Enum):
    SYSTEM = "system"
    PAPER_EXTRACTION = "paper_extraction"
    PAPER_RELATION = "paper_relation"
    DOCUMENT_ANALYSIS = "document_analysis"
    QUESTION_RANKING = "question_ranking"
    SUGGESTION_GENERATION = "suggestion_generation"
    SUGGESTION_RANKING = "suggestion_ranking"
    DOCUMENT_ANCHOR = "document_anchor"
    ANSWER_DIFF = "answer_diff"


SYSTEM_PROMPT = """You are an intelligent and precise research assistant that can understand scientific research papers and topics. You are knowledgeable in different fields and domains of science, in particular, computer science. You can help a user extract content from a document in the format of a Google doc or a markdown file."""


PAPER_EXTRACTION_PROMPT = """Given a document that describes a researcher's interests, return a list of all mentioned papers in the document. When possible make sure to provide the full title of the paper.
Include the link to the paper if available.
Always provide the context where the paper is mentioned.
For each paper, if the document explains how the paper relates to the research project (e.g., why it is cited, how it supports or motivates the work, what role it plays), provide a short "project_relation" summary (1-2 sentences). If no such explanation is present, try inferring from the context (surrounding text where the paper is mentioned) or content of the paper. If the paper appears in multiple places, make sure to mention them all. If there is no direct information and inferring the relation is impossible, leave it null.
Each paper should either have a link to the paper or the full title of the paper.
For a paper title, you don't have to be sure that it is a paper title. It is fine to include the title that are likely to be an academic paper title. We will look up the paper using the title later.
A paper title is often followed the paper metadata such as the authors, the abstract, the venue, the url, etc.
Sometimes there is no obvious title, only a link with the url of these domains: semanticscholar.org, arxiv.org, aclweb.org, acm.org, biorxiv.org. If so, provide the url and set the text to the label of the link.
Document:
{doc}"""


PAPER_RELATION_PROMPT = """You are given:
1) A short excerpt from a research project document where a paper is mentioned (or the surrounding context).
2) The paper's title and abstract.
3) An optional "project relation" -- how the author of the document described or implied the paper's relevance to the project.

Write a summary (1-2 sentences) that summarizes how this paper relates to the research project. Use the document context, the stated or implied relation, and the paper's content (title and abstract) to produce a concise, accurate summary. Do not invent relevance; base your summary only on the given inputs. Write in clear, neutral academic language.

Document excerpt (where the paper is mentioned):
{document_excerpt}

Paper title: {paper_title}

Paper abstract:
{paper_abstract}

Project relation (from document, if any): {project_relation}

Summary:
"""


DOCUMENT_ANALYSIS_PROMPT = """Today's date is {today}.

You are an AI research assistant tasked with analyzing a research document of a research project, figuring out the stage the project is in, finding information from existing literature, and providing useful information/insights from existing literature to help the researchers with their research project. Your first task is twofold: first, to infer the current state of the research project, and second, to generate a list of relevant and important questions that can be answered by consulting prior work in the field. The answers to these questions, depending on the stage of the project, should be able to help unblock the researcher, strengthen the quality of the research project, or inform them of unknown related work, etc.

Here is the research document you will be analyzing:

<research_document>
{doc}
</research_document>

First, carefully read and analyze the research document. Then, follow these steps:

1. Infer the project state:
   Based on the content and structure of the document, determine which stage the research project is likely to be in. Possible stages include, but are not limited to:
   - Ideation
   - Literature review
   - Experimental design
   - Data collection
   - Running experiments
   - Data analysis
   - Paper writing

   A research project might have multiple of these activities going on at once.
   Consider factors such as the level of details in different sections, the presence or absence of certain elements (e.g., methodology, results, discussion), and the overall focus of the document.
   If dates are provided, they might be notes of what the researcher was/is focusing on at each point in time. If there are conflicting information, prioritize the recent notes over older ones.
   This step is important as the state of the project determines the type of information the researchers are interested in.

2. Generate relevant questions:
   Create a list of questions that, when answered by consulting prior work, would provide information that is useful for the researcher in the current stage of the project. The question should not be too complicated to accommodate a deep research agent that can't answer complicated questions yet.

   These questions should be:
   a) Relevant: Directly related to the project's topic and goals
   b) Answerable from the literature: Can be addressed by reviewing existing research
   c) Context-independent: Complete in themselves, not requiring additional project context
   d) Timely: Appropriate and useful for the current project stage. Use a good judgement on what types of questions would be good for each research stage from a research scientist's perspective. For example, here are some topics that could be of interested for each state:
   - Ideation: The researcher is coming up with ideas for their project. They would want to know the novelty and feasibility of their ideas, see some inspirations such as solutions from existing papers, use cases, application from different domains. They might not be concerned about details such as experimental protocols or participants' compensation.
   - Literature review: This happens through out the project. Usually in this phase, researchers collect evidences that supports or refutes the claims, relevant claims from prior work, how to situate/frame the project within existing work, think about other work that is related to their ideas, prevent themselves for getting scooped, etc.
   - Experimental design: They are designing a story to learn about something or proving that something they build work. Here they might be looking for baseline ideas, evaluation criteria, experiment setup, things that can inform hypothesis and research question generation/iteration, measures used in prior work, how to plan for statistical analysis
   - Data collection: Usually they are head downs collecting data at this point. Some knowledge about data collection pipeline, method of data collections might be helpful. Also, they might want to know about literature that helps inform their data interpretation.
   - Data analysis: how prior work have analyzed data, what are the conclusions of related work, etc.
   - Paper writing: They are publishing the paper. All written text should be rigorous and thoughtful. Here they might want to know how strong their claims are or about supporting/contrasting evidences to their claims. They would also want to know how strong their framing of the paper is and how to improve them if necessaray.

   Throughout, normal related work are of researcher's interest. Be especially alert on finding work that might scoop this project.

Depending on the stage of the project, good questions could:
   - Help clarify or refine research objectives
   - Identify potential methodologies or experimental designs
   - Suggest relevant baselines or comparison points
   - Address potential limitations or challenges
   - Strengthen the project's theoretical foundation
   - Improve the interpretation or presentation of results
   - etc.,

For each question, provide an explanation of how the knowing the answer to the question could help with the project and point to specific part in the document that helps you come to this conclusion.

3. Prioritize the questions:
   Order the questions from most useful to least useful, considering their potential impact on improving the research project at its current stage.

Present your analysis as structured output with:
- project_state: The inferred project state (a string).
- why_project_state: Briefly explain your reasoning for inferring this project state.
- questions: A list of objects, each with:
  - question: The natural language question (one of the questions ordered from most to least useful).
  - explanation: How knowing the answer could help the project and which part of the document led you to this conclusion.

Order the questions from most useful to least useful. Each question must have both "question" and "explanation" fields.

Ensure that your analysis is thorough, well-reasoned, and directly based on the content of the provided research document.
"""


QUESTION_RANKING_PROMPT = """You are helping a research scientist prioritize which questions would be most useful to answer for their current project. The questions will be issued to a Q&A system that retrieves answers from prior work. You will be given information about their project and a list of questions, and you need to rank the questions from most useful to least useful.

Here is the project document:
<project_document>
{doc}
</project_document>

Here is the current state of the project:
<project_state>
{project_state}
</project_state>

Here is the explanation of how this project state was inferred:
<state_explanation>
{why_project_state}
</state_explanation>

Here are the questions to rank:
<questions>
{questions}
</questions>

Your task is to select and rank the top questions that are BOTH highly useful AND diverse. The final set should cover different aspects of the project -- avoid choosing several questions that ask about the same thing or overlap heavily. Favor a mix of questions that address different information needs, methodologies, or angles.

When evaluating usefulness, consider:
- How directly the question relates to the current project goals and methodology
- Whether answering the question would help overcome current limitations or challenges
- How much the answer could advance the project to the next stage
- Whether the question addresses critical gaps in knowledge or methodology
- The potential impact on the project's success if this question were answered

When ensuring diversity, consider:
- Do the selected questions cover distinct topics, sub-questions, or types of information?
- Would answering one question leave another redundant (if so, prefer the stronger one and pick a different question for the set)?
- Does the set collectively give a broad, non-redundant view of what the researcher needs to learn?

Before providing your ranking, use the scratchpad below to think through your analysis:

<scratchpad>
Think through each question and evaluate:
1. How it relates to the current project state and goals
2. What specific value answering it would provide
3. How it compares in importance to the other questions
4. How likely will it be answerable by prior work
5. How it differs from other candidate questions (avoid clustering similar questions in the final set)
</scratchpad>

After your analysis, provide your final ranking. For each question in your ranked list, briefly explain why you placed it at that position and how answering it would benefit the project.

Your final answer should contain only the ranked list of questions (from most useful to least useful) with brief explanations for each ranking decision. The question text should STRICTLY follow the provided question text (if an explanation was provided, do not include the explanation). Do not repeat your scratchpad analysis in the final answer.
"""


SUGGESTION_GENERATION_PROMPT = """You are an AI research assistant tasked with generating summary and actionable suggestions based on the following answer for a query issued to a deep research system. Your goal is to give a 1-2 paragraphs summary and provide ways to utilize this information in an ongoing research project described in a given research document.

Here is the question issued to the deep research system:
<question>
{question}
</question>

Why this question was asked for the project (use this to prioritize and anchor your summary and suggestions):
<question_explanation>
{question_explanation}
</question_explanation>

Here is the answer from the deep research system:
<answer>
{answer}
</answer>

The answer includes citation labels that link to academic papers. Here are the labels for this answer:
<citation_labels>
{citation_labels}
</citations_labels>

The research project is described by the following document:
<research_document>
{doc}
</research_document>

The research project is in the "{project_state}" stage because {why_project_state}.

First, your task is to summarize the answer into 2-3 paragraphs. Follow these guidelines:

1. Discard information irrelevant to the question or the project.
2. Prioritize information based on its importance to the project. Important information could:
   - Help clarify or refine research objectives
   - Identify potential methodologies or experimental designs
   - Suggest relevant baselines or comparison points
   - Address potential limitations or challenges
   - Strengthen the project's theoretical foundation
   - Improve the interpretation or presentation of results
3. Avoid repeating information already present in the project document.
4. Highlight new information specifically relevant to the research document (e.g., new papers supporting a claim, findings contradicting assumptions in the document).
5. Use a tone as if one researcher is informing another about relevant points of interest to check out. Avoid prescriptive language.
6. Include the original citation labels of relevant information in the summary.
7. Be specific, providing important details that support the statements.
8. For each statement in the summary, try to include all papers in the original summary that supports that statement.
9. If a paper is mentioned, you MUST use the EXACT original label as provided in citation_labels

Remember, your summary should be concise yet informative, focusing on the most relevant and important information for the research project.

Second, carefully analyze the answer and consider how the information could be applied in various research contexts. Generate a list of actionable suggestions, each accompanied by at least one associated paper and relevant information from that paper.

When formulating your suggestions, consider the following use cases:
1. Strengthening a claim in a research document with more documents
2. Calling for reconsideration of a claim in a research document (in case of conflicting information)
3. Providing ideas for solutions, methods, baselines, datasets, evaluation, or experimental design based on the current stage of a research project
4. Anchor the researcher on "why" this suggestion in the context of their project by pointing back to specific part of the research document.

For each suggestion:
1. Clearly state the suggestion in text and explain how it could improve the project.
2. Provide at least one associated paper label (use all relevant papers if multiple apply).
3. In the suggestions text, mention how the paper(s) inspires the suggestion.
4. Include relevant information from the paper(s) that supports or relates to the suggestion
5. Make sure that the suggestion is timely. (For example, if the project is already in the paper writing stage, it is unreasonable to suggest the researcher to redesign the experiment). Here are some topics that could be of interested for each state:
   - Ideation: The researcher is coming up with ideas for their project. They would want to know the novelty and feasibility of their ideas, see some inspirations such as solutions from existing papers, use cases, application from different domains. They might not be concerned about details such as experimental protocols or participants' compensation.
   - Literature review: This happens through out the project. Usually in this phase, researchers collect evidences that supports or refutes the claims, relevant claims from prior work, how to situate/frame the project within existing work, think about other work that is related to their ideas, prevent themselves for getting scooped, etc.
   - Experimental design: They are designing a story to learn about something or proving that something they build work. Here they might be looking for baseline ideas, evaluation criteria, experiment setup, things that can inform hypothesis and research question generation/iteration, measures used in prior work, how to plan for statistical analysis
   - Data collection: Usually they are head downs collecting data at this point. Some knowledge about data collection pipeline, method of data collections might be helpful. Also, they might want to know about literature that helps inform their data interpretation.
   - Data analysis: how prior work have analyzed data, what are the conclusions of related work, etc.
   - Paper writing: They are publishing the paper. All written text should be rigorous and thoughtful. Here they might want to know how strong their claims are or about supporting/contrasting evidences to their claims. They would also want to know how strong their framing of the paper is and how to improve them if necessaray.

   Throughout, normal related work are of researcher's interest. Be especially alert on finding work that might scoop this project.
6. Use a tone as if one researcher is informing another about relevant points of interest to check out. Avoid prescriptive language.
7. ALWAYS provide citations to any information (e.g., claim, clause, method) that is from a paper with sources.
8. If a paper is mentioned, you MUST use the EXACT original label as provided in citation_labels
9. Provide an anchor to the project document or any understanding of the thing the researcher might be trying to do. Cite specific part of the document that is relevant. The point is to help the researcher see the relevant context quickly. For example, a suggestion could be "If you are still deciding on the evaluation metrics (based on the note from <date>), you could consider using this metrics from paper X which has been used for Y. The pro is ... the con is ..."
10. Create a title that summarizes what the suggestion is in a few words.

If you encounter incomplete information in the answer that requires further investigation, assume you have access to a tool that can retrieve paper abstracts and full texts. Mark such papers with (to_lookup) after the paper label.

Important: Order your suggestions by listing the most useful, important, and relevant to the project phase first. This prioritization will help researchers focus on the most impactful actions.

Before writing your summary and actionable suggestions, use a <scratchpad> to organize your thoughts and identify the most important points to include.

Format your output as follows:
<output>
    <summary>
    [Your 2-3 paragraph summary here, following the guidelines above]
    </summary>

    <suggestions>
    <suggestion>
    <title>[Title that summarizes the suggestion in a few words]</title>
    <text>[Your suggestion here]</text>
    <papers>
    <paper to_lookup=[true or false]>[Paper 1 label] (to lookup - if applicable)</paper>
        ... more papers if applicable ...
    </papers>
    <info>[Relevant information from the paper]</info>
    </suggestion>
    [Repeat for each suggestion]
    </suggestions>
</output>
"""


SUGGESTION_RANKING_PROMPT = """You are helping a research scientist rank recommendations for their project. You need to rank the provided recommendations from most relevant and actionable to least relevant and actionable.

Here is the project documentation:
<project_doc>
{doc}
</project_doc>

Here is the current project state:
<project_state>
{project_state}
</project_state>

Here are the recommendations to rank:
<recommendations>
{recommendations}
</recommendations>

Your task is to rank these recommendations so the top set is BOTH highly relevant/actionable AND diverse. Favor a mix of recommendations that cover different papers, angles, or types of advice -- avoid selecting several suggestions that point to the same paper or give nearly identical advice.

Rank based on three criteria:
1. **Relevance**: How well does the recommendation align with the project goals, current state, and identified information needs?
2. **Actionability**: How much information gain would implementing this recommendation provide? Consider whether the recommendation is specific enough to act upon and likely to yield valuable insights.
3. **Diversity**: Does the selected set cover distinct recommendations? Prefer spreading across different sources, perspectives, and types of suggestions rather than clustering similar ones.

<scratchpad>
Before ranking, analyze each recommendation by:
- Assessing how directly it addresses the project's current needs and goals
- Evaluating the potential information gain and practical value
- Considering the specificity and feasibility of the recommendation
- Noting any dependencies or prerequisites that might affect implementation
- Checking overlap with other recommendations (favor variety: different papers, different angles, different kinds of advice)
</scratchpad>

Provide your analysis and ranking in the following format:

For each recommendation, first provide your reasoning for its ranking position, then list the recommendation. Order them from most relevant and actionable (1st) to least relevant and actionable (last).

**Ranking:**

**1. [Most relevant and actionable]**
Reasoning: [Explain why this recommendation ranks first in terms of relevance to the project and actionability/information gain]
Recommendation: [State the recommendation]

**2. [Second most relevant and actionable]**
Reasoning: [Explain the ranking rationale]
Recommendation: [State the recommendation]

[Continue this pattern for all recommendations]

Make sure to clearly justify each ranking based on relevance, actionability, and (where it helps break ties) how the set stays diverse (different papers, angles, or types of advice).
In the output, the recommendation should be verbatim as the original recommendation text.
"""


DOCUMENT_ANCHOR_PROMPT = """You are an AI scientific research assistant that links research suggestions to specific sentences in a research document.

Today's date is {today}.

Below is a research document split into numbered sentences:

<document_sentences>
{document_sentences}
</document_sentences>

Below is a list of suggestions that were generated for this research project. Each has a unique ID, text content, and optionally an explanation of why this suggestion was made:

<items>
{items}
</items>

Your task: For each suggestion, identify the single sentence in the document that it is most relevant to. Use the suggestion's explanation (when provided) to understand the intent behind the suggestion and find the best document sentence.

Guidelines:
1. Only link to sentences that are clearly relevant -- do not force matches.
2. Prefer specific, meaningful sentences over generic ones (e.g., section headers alone are usually not enough).
3. Copy the exact verbatim sentence text as the quote.
4. For each item, return exactly one match -- the single sentence that most directly and importantly relates to the suggestion. When evaluating whether a sentence is relevant, consider a few surrounding sentences as context (the sentences immediately before and after it), not just the candidate sentence in isolation. If multiple nearby sentences are relevant, choose the one with the strongest connection to the suggestion. Prefer recent content over older content. Each document has its own ordering; try to infer where the recent content is (could be at the end, the beginning, or the middle). Make use of dates when given, and use today's date to determine what is recent. If no sentence is clearly relevant, return an empty matches list.
5. The sentence_index must correspond to the number shown before each sentence in the document.
6. For each match, provide a "reasoning" field: 1-2 sentences explaining why this document sentence is relevant to the suggestion. Be specific about the connection.
7. For each match, provide a "location" field: a short label describing where in the document this sentence appears. Use the nearest section heading, tab name, or date if available (e.g., "Experiment Design > 22 Aug 2025", "Introduction", "Notes from Week 3"). If no clear heading exists, describe the position (e.g., "Near the beginning", "Midway through the document").

Return your answer as a JSON object with this structure:
{
  "<item_id>": {
    "matches": [
      { "sentence_index": <int>, "quote": "<exact sentence text>", "reasoning": "<why this sentence is relevant>", "location": "<where in the document>" }
    ]
  }
}

Include every item_id from the input, even if matches is empty.
"""


ANSWER_DIFF_PROMPT = """You are an expert research assistant comparing two ScholarQA answers to the same question, generated at different times. Your goal is to identify substantive differences that could lead to actionable suggestions for the researcher.

## Question
{question}

## Project State
{project_state}

## Previous Answer
{old_answer}

## Latest Answer
{new_answer}

## Instructions

Compare the two answers and determine whether there are meaningful differences relevant to the project. Meaningful differences include:
- New papers or findings not present in the previous answer
- Contradicted or updated findings
- New methods, tools, or approaches that have appeared
- Shifts in consensus or emphasis within the field

Do NOT flag differences that are:
- Merely rephrased or reorganized versions of the same content
- Minor wording changes without substantive new information
- Differences in citation formatting or paper ordering

For each meaningful difference, produce a concise, actionable suggestion the researcher can use.

Return a JSON object with:
- "has_meaningful_diff": true/false
- "suggestions": a list of objects, each with "title" (short headline), "text" (actionable suggestion), and "info" (supporting context from the new answer)

If there are no meaningful differences, return has_meaningful_diff=false and an empty suggestions list.
"""


@dataclass(frozen=True)
class PromptTemplate:
    template_id: TemplateId
    text: str
    variables: tuple[str, ...]


TEMPLATES: dict[TemplateId, PromptTemplate] = {
    t.template_id: t
    for t in (
        PromptTemplate(TemplateId.SYSTEM, SYSTEM_PROMPT, ()),
        PromptTemplate(TemplateId.PAPER_EXTRACTION, PAPER_EXTRACTION_PROMPT, ("doc",)),
        PromptTemplate(
            TemplateId.PAPER_RELATION,
            PAPER_RELATION_PROMPT,
            ("document_excerpt", "paper_title", "paper_abstract", "project_relation"),
        ),
        PromptTemplate(
            TemplateId.DOCUMENT_ANALYSIS, DOCUMENT_ANALYSIS_PROMPT, ("today", "doc")
        ),
        PromptTemplate(
            TemplateId.QUESTION_RANKING,
            QUESTION_RANKING_PROMPT,
            ("doc", "project_state", "why_project_state", "questions"),
        ),
        PromptTemplate(
            TemplateId.SUGGESTION_GENERATION,
            SUGGESTION_GENERATION_PROMPT,
            (
                "question",
                "question_explanation",
                "answer",
                "citation_labels",
                "doc",
                "project_state",
                "why_project_state",
            ),
        ),
        PromptTemplate(
            TemplateId.SUGGESTION_RANKING,
            SUGGESTION_RANKING_PROMPT,
            ("doc", "project_state", "recommendations"),
        ),
        PromptTemplate(
            TemplateId.DOCUMENT_ANCHOR,
            DOCUMENT_ANCHOR_PROMPT,
            ("today", "document_sentences", "items"),
        ),
        PromptTemplate(
            TemplateId.ANSWER_DIFF,
            ANSWER_DIFF_PROMPT,
            ("question", "project_state", "old_answer", "new_answer"),
        ),
    )
}


@dataclass(frozen=True)
class PromptRequest:
    template_id: TemplateId
    variables: dict[str, str]
    system: str
    prompt: str
    request_hash: str


def render_template(template_id: TemplateId, variables: dict[str, str]) -> str:
    template = TEMPLATES[template_id]
    missing = [name for name in template.variables if name not in variables]
    if missing:
        raise ValidationFailure(
            f"unbound placeholders for {template_id.value}: {missing}"
        )
    extra = [name for name in variables if name not in template.variables]
    if extra:
        raise ValidationFailure(f"unknown variables for {template_id.value}: {extra}")
    text = template.text
    for name in template.variables:
        text = text.replace("{" + name + "}", str(variables[name]))
    return text


def compute_request_hash(template_id: TemplateId, variables: dict[str, str]) -> str:
    canonical = json.dumps(
        {"template_id": template_id.value, "variables": variables},
        sort_keys=True,
        ensure_ascii=False,
    )
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def build_request(template_id: TemplateId, variables: dict[str, str]) -> PromptRequest:
    prompt = render_template(template_id, variables)
    return PromptRequest(
        template_id=template_id,
        variables=dict(variables),
        system=SYSTEM_PROMPT,
        prompt=prompt,
        request_hash=compute_request_hash(template_id, variables),
    )
