#pragma once

#include <string>
#include <vector>

#include "ruscarl/rubric.hpp"

namespace ruscarl {

// "role: content" turns separated by blank lines; the candidate response is
// appended as the final assistant turn.
std::string render_conversation(const std::vector<ConversationTurn>& turns,
                                const std::string& response);

// "[points] text" rubric-item line.
std::string render_rubric_item(const Criterion& criterion);

// Judge prompt for one (conversation, response, criterion) triple. Fixed text
// outside the two substitution slots.
std::string render_judge_prompt(const RubricTask& task,
                                const std::string& response,
                                const Criterion& criterion);

// Scaffold preamble for a rubric subset: positive-point criteria under the
// INCLUDE section, negative-point ones under AVOID; a section with no bullets
// is omitted; an empty subset renders as the empty string. Throws
// SubsetNotInRubric when a subset element is not a task criterion.
std::string render_scaffold_prompt(const RubricTask& task,
                                   const std::vector<Criterion>& subset);

// Rubric data-generation prompt for a question/answer pair.
std::string render_rubric_gen_prompt(const std::string& question,
                                     const std::string& answer);

} // namespace ruscarl
