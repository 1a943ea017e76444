#include "fixtures.hpp"

#include "mc/preprocess.hpp"

namespace fixtures {

mc::EvaluatedResponse viking_response() {
    mc::LabeledText labeled = mc::label_sentences(kVikingRaw, mc::LabelMode::prose);
    mc::EvaluatedResponse response;
    response.id = "viking-gen";
    response.raw_text = kVikingRaw;
    response.labeled_text = std::move(labeled.labeled_text);
    response.sentence_spans = std::move(labeled.spans);
    response.quality_tier = mc::QualityTier::medium;
    response.reward_score = 0.7;
    return response;
}

mc::CriteriaTree viking_tree() {
    mc::CriteriaTree tree;
    tree.primaries.push_back(
        {"Information Richness",
         "How much useful detail the response carries.",
         {{"Detailed Steps", "Concrete steps where the task calls for them.", "important"},
          {"Supporting Evidence", "Backing for claims made in the response.", "medium"}}});
    tree.primaries.push_back(
        {"Accuracy",
         "Factual correctness of the response.",
         {{"Factual Correctness", "No incorrect statements.", "important"}}});
    return tree;
}

mc::Query viking_query() {
    mc::Query query;
    query.id = "viking";
    query.conversation = {
        {mc::Speaker::user, "You are a viking conquering enemy lands. Your name is"}};
    query.task_family = mc::TaskFamily::general;
    query.source_tag = "roleplay";
    return query;
}

}  // namespace fixtures
