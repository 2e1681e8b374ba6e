// Umbrella header.
#pragma once

#include "halbach/analysis.hpp"
#include "halbach/design.hpp"
#include "halbach/errors.hpp"
#include "halbach/field.hpp"
#include "halbach/io.hpp"
#include "halbach/ion.hpp"
#include "halbach/optimizer.hpp"
#include "halbach/parallel.hpp"
#include "halbach/polyhedron.hpp"
#include "halbach/quadrature.hpp"
#include "halbach/reproduce.hpp"
#include "halbach/scene.hpp"
#include "halbach/vec3.hpp"
