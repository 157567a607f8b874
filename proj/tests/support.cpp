#include "support.hpp"

namespace testkit {

const wildknot::BallCover& preset_cover() {
  static const wildknot::BallCover c = wildknot::build_cover(wildknot::spun_trefoil_preset(), 0);
  return c;
}

const wildknot::ReflectionGroup& preset_group() {
  static const wildknot::ReflectionGroup g = wildknot::assemble_group(preset_cover());
  return g;
}

const wildknot::BallCover& dumbbell_cover() {
  static const wildknot::BallCover c = wildknot::build_cover(wildknot::dumbbell_fixture(), 0);
  return c;
}

const wildknot::ReflectionGroup& dumbbell_group() {
  static const wildknot::ReflectionGroup g = wildknot::assemble_group(dumbbell_cover());
  return g;
}

}  // namespace testkit
