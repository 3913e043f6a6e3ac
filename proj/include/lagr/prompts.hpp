#pragma once

#include <string>
#include <vector>

#include "lagr/cube_env.hpp"

namespace lagr {

// Fixed task context handed to the language model. The template carries
// exactly one {{STATE}} marker where the rendered environment state goes.
struct TaskDescriptor {
  std::string id;
  std::string template_text;
};

inline constexpr const char* kStateMarker = "{{STATE}}";

// Built-in descriptors for the three tasks. The 8-cube descriptor is also
// shipped as prompts/cube.txt (a test pins the two copies together).
TaskDescriptor cube_descriptor(const std::vector<CubeSpec>& cubes);
TaskDescriptor image_descriptor();
TaskDescriptor arrangement_descriptor();

TaskDescriptor descriptor_from_file(const std::string& id,
                                    const std::string& path);

// Template with the marker replaced by the rendered state; byte-stable.
std::string render_prompt(const TaskDescriptor& d,
                          const std::string& rendered_state);

}  // namespace lagr
