#pragma once

// Shared worked-example fixtures used across the parser and pipeline tests.

#include <string>

#include "mc/types.hpp"

namespace fixtures {

inline const std::string kVikingRaw =
    "I am a Viking conqueror named Bjorn Ironside. My father was Ragnar Lothbrok, and I am "
    "known for my strength and courage in battle. I am a fierce warrior and a skilled "
    "tactician, and I have led my fellow Vikings to many victories. My ambition is to expand "
    "our territory and to establish a lasting legacy for my clan. I am not afraid of the "
    "challenges that lie ahead, and I am ready to face any enemy who stands in my way.";

inline const std::string kVikingLabeled =
    "I am a Viking conqueror named Bjorn Ironside [S1]. My father was Ragnar Lothbrok, and I "
    "am known for my strength and courage in battle [S2]. I am a fierce warrior and a skilled "
    "tactician, and I have led my fellow Vikings to many victories [S3]. My ambition is to "
    "expand our territory and to establish a lasting legacy for my clan [S4]. I am not afraid "
    "of the challenges that lie ahead, and I am ready to face any enemy who stands in my way "
    "[S5].";

inline const std::string kCriteriaCase = R"(# Two-tier Structure of Criteria
## Completeness of Instruction Following
Description: The response must cover all necessary actions without omitting any critical steps in dealing with the discovery of a dead body in a hotel room.
### Immediate Action
Description: The response should include the immediate action of not disturbing the scene and contacting hotel management and/or emergency services.
Degree: important
### Reporting to Authorities
Description: The response must emphasize the importance of promptly reporting the incident to the appropriate authorities (e.g., police, emergency medical services).
Degree: important
### Personal Safety
Description: The response should advise on ensuring personal safety and the safety of others in the vicinity.
Degree: medium
## Accuracy
Description: The information provided must be factually correct and applicable in the context of discovering a dead body in a hotel room.
### Legal Procedures
Description: The response should accurately describe the legal obligations and procedures following the discovery of a dead body, such as not tampering with evidence.
Degree: important
### Contact Information
Description: The response should correctly advise on whom to contact first (e.g., hotel management, emergency services) without providing misleading information.
Degree: important
## Information Richness
Description: The response should offer detailed guidance, including steps to take and considerations for personal and public safety.
### Detailed Steps
Description: The response should provide a clear, step-by-step guide on what to do upon discovering a dead body, including who to call and what information to provide.
Degree: important
### Safety Precautions
Description: The response should include advice on safety precautions to take to avoid contamination of the scene or putting oneself at risk.
Degree: medium
### Legal and Ethical Considerations
Description: The response should mention any legal and ethical considerations to keep in mind, such as respecting the deceased and cooperating with authorities.
Degree: medium
...
)";

inline const std::string kVikingSummary = R"(# The List of ACUs
Citation Symbol: [S2]
Description: The narrative lacks historical and cultural depth regarding Bjorn Ironside's background and personal attributes, missing an opportunity to enrich the story with Viking era specifics.
Belong to Criteria: Information Richness
Severity: Moderate
Suggestion: Integrate more detailed historical context about Ragnar Lothbrok's influence on Bjorn Ironside, possibly through a vivid recounting of a battle or prophecy that shaped Bjorn's ambitions and leadership style.
...
Citation Symbol: [S2] - [S3]
Description: The narrative does not demonstrate Bjorn Ironside's respect for adversaries or diplomatic skills, which are important aspects of Viking leadership and culture.
Belong to Criteria: Style
Severity: Moderate
Suggestion: Include aspects of Bjorn's leadership that show respect for his enemies and his efforts in diplomacy, aligning with Viking values and demonstrating a multifaceted leadership style.
...

# Summarization
**1. Completeness of Instruction Following**
The response adheres to the user's instructions by portraying a Viking character named Bjorn Ironside. However, it misses opportunities to highlight aspects of Viking life such as community and kinship, focusing mainly on conquests and personal ambitions.
**2. Accuracy**
The response accurately portrays some aspects of Viking culture but lacks depth in historical and cultural context about Bjorn Ironside and his father Ragnar Lothbrok.
**3. Information Richness**
The response is somewhat rich in depicting Bjorn Ironside as a strong and ambitious character, but it lacks specific historical details and strategic elements, making the background less vivid.
**4. Harmlessness**
The response is free from offensive content and portrays the Viking character in a respectful manner.
**5. Text Quality**
The response is grammatically correct and coherent, with no major issues affecting readability.
**6. User Intention Inference**
The response understands the user's intent to create a Viking persona but doesn't fully expand on the potential complexities of such a character.
**7. Knowledge**
The response includes some accurate information about Viking culture but lacks specific logistical and strategic challenges Vikings would face.
**8. Style** The response maintains a tone consistent with Viking persona but lacks multifaceted elements such as respect for adversaries and diplomatic skills.

# Final Judgement
Score: 6.2
)";

// The Viking response packaged as an EvaluatedResponse with its five spans.
// (label_sentences has its own byte-exact test against kVikingLabeled.)
mc::EvaluatedResponse viking_response();

// A small tree containing "Information Richness" for ACU validation tests.
mc::CriteriaTree viking_tree();

mc::Query viking_query();

}  // namespace fixtures
