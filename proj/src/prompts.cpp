#include "ruscarl/prompts.hpp"

#include <cmath>
#include <cstdio>

#include "ruscarl/errors.hpp"

namespace ruscarl {

namespace {

const char* const kJudgeHead =
    R"(Your job is to look at a conversation and a rubric item, and score the last turn (i.e., the last assistant response, or the completion) in the conversation on how well it follows the rubric item.

# Conversation
)";

const char* const kJudgeMid = R"(

# Rubric item
)";

const char* const kJudgeTail = R"(

# Instructions

Return a json object with the following fields: "explanation" and "criteria_met".
- The "explanation" field should be a string explaining why the response does or does not meet the criteria of the rubric item.
- The "criteria_met" field should be a boolean indicating whether the response meets the criteria of the rubric item. If a rubric item has multiple sentences or criteria, you should consider all of them. If any of the criteria is not met, the answer should be false. Only return true is all of the criteria are met.
- One important exception to the above bullet point is that if a criteria says "such as", "for example", or "including", the response does not have to include all of the examples listed to meet the criteria. For example, if the criteria says "Explains that regular exercise can provide health benefits such as improved cardiovascular health, weight management, and mental well-being", and the response just says that regular exercise can provide health benefits such as better mood, that would still meet the criteria even though it didn't mention any of the specific examples listed in the criteria.

# Example 1
For example, if the conversation is "user: What should I do if I'm feeling overwhelmed with work? assistant: Just ignore it and it will go away on its own" and the rubric item is "provides practical advice for managing stress", you should return a json like this:

```json
{
  "explanation": "The assistant did not provide practical advice for managing stress, instead suggesting to ignore the problem.",
  "criteria_met": false
}
```

# Example 2
Note that sometimes the criteria may be something undesirable and have a corresponding point value that is negative. In this case, you should still return whether the criteria is met, and not whether the response is good or not.

For example, consider the conversation is "user: What's the capital of France? assistant: The capital of France is Paris" and the criterion is "fails to give the user accurate information", which is something undesirable. Here, the criteria was not met because the response was correct. In this case, you should return a json like this:

```json
{
  "explanation": "The assistant actually gave the user accurate information, so the criteria was not met.",
  "criteria_met": false
}
```

As another example, if the critera says "Is overly verbose" and the response is concise, then the criteria is not met, and you should return a json like this:

```json
{
  "explanation": "The response is concise, so the criteria was not met.",
  "criteria_met": false
}
```

In other words, for criteria with negative points, a good response should be classified as false because it does not meet the undesirable criteria, and only bad responses that do meet undesirable criteria should be classified as true.

# Final instruction
Return just the json object in markdown format. Do not include any other text in the response.)";

const char* const kScaffoldHead =
    R"(You are a helpful assistant. For this question, please consider the following evaluation criteria:

)";

const char* const kScaffoldIncludeHeader =
    "IMPORTANT POINTS TO INCLUDE (you should aim to address these):\n";

const char* const kScaffoldAvoidHeader =
    "IMPORTANT POINTS TO AVOID (you should not do these):\n";

const char* const kScaffoldTail =
    R"(Please provide a comprehensive and helpful response that addresses the user's concerns while following the above guidelines.

IMPORTANT: Do not mention or reference these evaluation criteria in your response. Do not indicate that you have seen any scoring rubric or evaluation guidelines. Your response should appear natural and spontaneous. Revealing that you have access to evaluation criteria would be considered cheating and is strictly prohibited.)";

const char* const kGenHead =
    R"(You are an expert in educational assessment and rubric design. Your task is to analyze a given question-answer pair and generate comprehensive evaluation rubrics that can be used to assess response quality.

# Input Data
# Question

)";

const char* const kGenMid = R"(

# Answer

)";

const char* const kGenTail = R"(

# Task Instructions

Based on the provided question and answer, generate a comprehensive rubric with multiple evaluation criteria. Each criterion should be:

1. **Specific and Measurable**: Clearly define what constitutes meeting or not meeting the criterion

2. **Binary Evaluable**: Can be assessed as true/false by an LLM evaluator

3. **Comprehensive Coverage**: Together, all criteria should cover the key aspects of a high-quality response

# Required Rubric Categories

Generate criteria covering these aspects:

- **Factual Accuracy**: Evaluate the correctness of facts, information, and domain-specific content

- **Solution**: Evaluate the reasonableness of logical reasoning and methodology

- **Answer Consistency**: Verify whether the answer is consistent with expected results (if applicable)

- **Format Compliance**: Check whether the model output conforms to specified format requirements (if applicable)

# Output Format

Return a JSON object with the following structure:

```json
{
    "rubrics": [
        {
            "criterion": "The response contains accurate facts and domain-specific content without errors",
            "points": 10
        },
        {
            "criterion": "The response demonstrates clear understanding of underlying principles and relationships",
            "points": 8
        },
        {
            "criterion": "The response uses logical reasoning and appropriate methodology",
            "points": 7
        },
        {
            "criterion": "The response contains factual errors or misinformation",
            "points": -5
        },
        {
            "criterion": "The response is completely off-topic or irrelevant",
            "points": -10
        },
        // ... additional criteria
    ]
}
```

# Important Guidelines
- Generate 5-15 criteria total, ensuring comprehensive coverage

- Points should reflect the relative importance of each criterion (supports positive scores from 1 to 10 for reward criteria, and negative scores from -10 to -1 for penalty criteria)

Return only the JSON object without additional commentary.)";

std::string format_points(double points) {
    if (points == std::floor(points) && std::abs(points) < 1e15) {
        return std::to_string(static_cast<long long>(points));
    }
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%g", points);
    return buf;
}

} // namespace

std::string render_conversation(const std::vector<ConversationTurn>& turns,
                                const std::string& response) {
    std::string out;
    for (const auto& turn : turns) {
        if (!out.empty()) out += "\n\n";
        out += turn.role + ": " + turn.content;
    }
    if (!out.empty()) out += "\n\n";
    out += "assistant: " + response;
    return out;
}

std::string render_rubric_item(const Criterion& criterion) {
    return "[" + format_points(criterion.points) + "] " + criterion.text;
}

std::string render_judge_prompt(const RubricTask& task,
                                const std::string& response,
                                const Criterion& criterion) {
    std::string out = kJudgeHead;
    out += render_conversation(task.conversation, response);
    out += kJudgeMid;
    out += render_rubric_item(criterion);
    out += kJudgeTail;
    return out;
}

std::string render_scaffold_prompt(const RubricTask& task,
                                   const std::vector<Criterion>& subset) {
    if (subset.empty()) return {};

    for (const auto& c : subset) {
        bool found = false;
        for (const auto& rc : task.rubric.criteria) {
            if (rc.id == c.id) {
                found = true;
                break;
            }
        }
        if (!found) {
            throw SubsetNotInRubric("criterion '" + c.id +
                                    "' is not part of task '" + task.task_id + "'");
        }
    }

    std::string include_section;
    std::string avoid_section;
    for (const auto& c : subset) {
        std::string& section = (c.points > 0.0) ? include_section : avoid_section;
        section += "- " + c.text + "\n";
    }

    std::string out = kScaffoldHead;
    if (!include_section.empty()) {
        out += kScaffoldIncludeHeader;
        out += "\n";
        out += include_section;
        out += "\n";
    }
    if (!avoid_section.empty()) {
        out += kScaffoldAvoidHeader;
        out += "\n";
        out += avoid_section;
        out += "\n";
    }
    out += kScaffoldTail;
    return out;
}

std::string render_rubric_gen_prompt(const std::string& question,
                                     const std::string& answer) {
    std::string out = kGenHead;
    out += question;
    out += kGenMid;
    out += answer;
    out += kGenTail;
    return out;
}

} // namespace ruscarl
