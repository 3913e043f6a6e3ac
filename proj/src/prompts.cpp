#include "lagr/prompts.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace lagr {

namespace {

std::string format_edge(double cm) {
  // Edge lengths are whole centimeters in every cube set.
  if (cm == std::floor(cm)) {
    return std::to_string(static_cast<long>(cm));
  }
  std::ostringstream os;
  os << cm;
  return os.str();
}

}  // namespace

TaskDescriptor cube_descriptor(const std::vector<CubeSpec>& cubes) {
  std::string t = "A table contains the following objects:\n";
  for (const auto& c : cubes) {
    t += "- " + c.color + " cube of edge length " + format_edge(c.edge_cm) +
         "cm (represented by '" + std::string(1, cube_letter(c.id)) + "')\n";
  }
  t +=
      "A human is currently stacking some of the cubes in the following "
      "sequence (from bottom to top):\n"
      "{{STATE}}\n"
      "You are an organizing robot. Stack the remaining cubes in the pattern "
      "that human seems to be following. The final stack should have all " +
      std::to_string(cubes.size()) +
      " cubes. Lets think step by step.\n"
      "For example, if the stack is initially in the order (bottom to top)\n"
      "['a','d','b']\n"
      "Then, the explanation is that the human is likely first stacking the "
      "red cubes irrespective of their edge lengths, followed by the blue "
      "cubes. So a possible order would be: (bottom to top):\n"
      "['a','d','b','c','f','e','g','h']\n"
      "Make sure your response contains only the order in the form of a list "
      "and not the explanation.\n";
  return {"cube", std::move(t)};
}

TaskDescriptor image_descriptor() {
  return {"image",
          "The following matrix corresponds to an image of size 10x10. 1 "
          "represents a white pixel, while 0 represents a black pixel. If the "
          "initial image is:\n"
          "{{STATE}}\n"
          "Observe the pattern in the initial image. It is a partially "
          "complete pattern of a common geometric shape. Guess the final "
          "shape and display it in the form of a 10x10 matrix. Note that all "
          "the initial pixels are in their correct positions. So the final "
          "image must necessarily contain the initial pixels as they are, "
          "and should not contain any additional pixels that are not part of "
          "the shape. Lets think step by step. Make sure your response "
          "contains only the image, and not the explanation.\n"
          "Example 1: If the initial image is:\n"
          "[[0,0,0,0,0,0,0,0,0,0],\n"
          "[0,0,0,0,0,0,0,0,0,0],\n"
          "[0,0,0,1,1,1,0,0,0,0],\n"
          "[0,0,1,0,0,0,0,0,0,0],\n"
          "[0,0,1,0,0,0,0,0,0,0],\n"
          "[0,0,1,0,0,0,0,0,0,0],\n"
          "[0,0,1,0,0,0,0,0,0,0],\n"
          "[0,0,0,1,0,0,0,0,0,0],\n"
          "[0,0,0,0,0,0,0,0,0,0],\n"
          "[0,0,0,0,0,0,0,0,0,0]]\n"
          "Then the full image may be in the shape of an oval, in which case "
          "the final image would be:\n"
          "[[0,0,0,0,0,0,0,0,0,0],\n"
          "[0,0,0,0,0,0,0,0,0,0],\n"
          "[0,0,0,1,1,1,0,0,0,0],\n"
          "[0,0,1,0,0,0,1,0,0,0],\n"
          "[0,0,1,0,0,0,1,0,0,0],\n"
          "[0,0,1,0,0,0,1,0,0,0],\n"
          "[0,0,1,0,0,0,1,0,0,0],\n"
          "[0,0,0,1,1,1,0,0,0,0],\n"
          "[0,0,0,0,0,0,0,0,0,0],\n"
          "[0,0,0,0,0,0,0,0,0,0]]\n"
          "Example 2: If the initial configuration is:\n"
          "[[0,0,0,0,0,0,0,0,0,0],\n"
          "[0,0,0,0,0,0,0,0,0,0],\n"
          "[0,0,0,0,1,0,0,0,0,0],\n"
          "[0,0,0,1,0,1,0,0,0,0],\n"
          "[0,0,1,0,0,0,1,0,0,0],\n"
          "[0,0,0,0,0,0,0,0,0,0],\n"
          "[0,0,0,0,0,0,0,0,0,0],\n"
          "[0,0,0,0,0,0,0,0,0,0],\n"
          "[0,0,0,0,0,0,0,0,0,0],\n"
          "[0,0,0,0,0,0,0,0,0,0]]\n"
          "Then a possible pattern could correspond to a triangle, such that "
          "the final pattern would be:\n"
          "[[0,0,0,0,0,0,0,0,0,0],\n"
          "[0,0,0,0,0,0,0,0,0,0],\n"
          "[0,0,0,0,1,0,0,0,0,0],\n"
          "[0,0,0,1,0,1,0,0,0,0],\n"
          "[0,0,1,0,0,0,1,0,0,0],\n"
          "[0,1,0,0,0,0,0,1,0,0],\n"
          "[1,1,1,1,1,1,1,1,1,0],\n"
          "[0,0,0,0,0,0,0,0,0,0],\n"
          "[0,0,0,0,0,0,0,0,0,0],\n"
          "[0,0,0,0,0,0,0,0,0,0]]\n"};
}

TaskDescriptor arrangement_descriptor() {
  return {"arrange",
          "The following matrix corresponds to positions on a 5x5 table. 1 "
          "represents the presence of an object, while 0 represents an empty "
          "space on the table. If the initial table configuration is:\n"
          "{{STATE}}\n"
          "Observe the pattern of objects in the initial configuration. It "
          "is a partially complete pattern of a common scheme in which "
          "objects would be arranged. Guess the final arrangement scheme and "
          "display it in the form of a 5x5 matrix. Note that all the initial "
          "object positions are correct. So the final configuration must "
          "necessarily contain the initial object positions as they are. "
          "Lets think step by step. Make sure your response contains only "
          "the configuration, and not the explanation.\n"
          "Example 1: If the initial arrangement configuration is:\n"
          "[[0,0,0,0,0],\n"
          "[0,1,0,1,0],\n"
          "[0,0,0,0,0],\n"
          "[0,1,1,0,0],\n"
          "[0,0,0,0,0]]\n"
          "Then the full arrangement may be in the shape of a square, in "
          "which case the final arrangement would be:\n"
          "[[0,0,0,0,0],\n"
          "[0,1,1,1,0],\n"
          "[0,1,0,1,0],\n"
          "[0,1,1,1,0],\n"
          "[0,0,0,0,0]]\n"
          "Example 2: If the initial arrangement is:\n"
          "[[0,0,1,0,0],\n"
          "[0,1,0,0,0],\n"
          "[0,0,0,1,0],\n"
          "[0,0,1,0,0],\n"
          "[0,0,0,0,0]]\n"
          "Then a possible arrangement could be in the shape of an oval, "
          "such that the final arrangement would be:\n"
          "[[0,0,1,0,0],\n"
          "[0,1,0,1,0],\n"
          "[0,1,0,1,0],\n"
          "[0,0,1,0,0],\n"
          "[0,0,0,0,0]]\n"};
}

TaskDescriptor descriptor_from_file(const std::string& id,
                                    const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open template file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  TaskDescriptor d{id, buf.str()};
  if (d.template_text.find(kStateMarker) == std::string::npos) {
    throw std::runtime_error("template " + path + " has no " +
                             std::string(kStateMarker) + " marker");
  }
  return d;
}

std::string render_prompt(const TaskDescriptor& d,
                          const std::string& rendered_state) {
  const std::size_t pos = d.template_text.find(kStateMarker);
  if (pos == std::string::npos) {
    throw std::runtime_error("descriptor " + d.id + " has no state marker");
  }
  if (d.template_text.find(kStateMarker, pos + 1) != std::string::npos) {
    throw std::runtime_error("descriptor " + d.id +
                             " has more than one state marker");
  }
  std::string out = d.template_text;
  out.replace(pos, std::string(kStateMarker).size(), rendered_state);
  return out;
}

}  // namespace lagr
