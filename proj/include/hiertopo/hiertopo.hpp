#pragma once

#include <hiertopo/alternating_diffusion.hpp>
#include <hiertopo/assignment.hpp>
#include <hiertopo/complex.hpp>
#include <hiertopo/dataset.hpp>
#include <hiertopo/dataset_io.hpp>
#include <hiertopo/diffusion.hpp>
#include <hiertopo/embedding.hpp>
#include <hiertopo/errors.hpp>
#include <hiertopo/parallel.hpp>
#include <hiertopo/persistence.hpp>
#include <hiertopo/pipeline.hpp>
#include <hiertopo/text.hpp>
#include <hiertopo/wasserstein.hpp>
