#pragma once

#include <vector>

#include "dafsp/instance.hpp"

// The five-job reference instance used throughout the tests: two factories of
// three machines, two products ({1,3} and {2,4,5}), buffer capacity 3.
inline dafsp::Instance ref_instance() {
  dafsp::Instance inst;
  inst.jobs = 5;
  inst.factories = 2;
  inst.machines = 3;
  inst.products = 2;
  inst.proc = {{5, 3, 6}, {4, 3, 5}, {3, 3, 4}, {6, 4, 6}, {4, 6, 4}};
  inst.assembly = {4, 5};
  inst.plan = {{0, 2}, {1, 3, 4}};
  inst.buffer = 3;
  validate_instance(inst);
  return inst;
}

// The coding worked through the tests: entry order (1,4,5,3,2), jobs 3 and 4
// in factory 1, the rest in factory 2 (ids 1-based here, 0-based in code).
inline dafsp::Coding ref_coding() {
  return {{0, 3, 4, 2, 1}, {1, 1, 0, 0, 1}};
}

// Hand-computed timetable for ref_instance with the amended entry order
// (1,4,3,2,5): start/completion per job and machine, assembly chain, spans.
struct RefSchedule {
  std::vector<std::vector<dafsp::Time>> start = {
      {1, 6, 9}, {7, 12, 16}, {10, 13, 16}, {0, 6, 10}, {11, 15, 21}};
  std::vector<std::vector<dafsp::Time>> completion = {
      {6, 9, 15}, {11, 15, 21}, {13, 16, 20}, {6, 10, 16}, {15, 21, 25}};
  std::vector<dafsp::Time> assembly_start = {20, 25};
  std::vector<dafsp::Time> assembly_completion = {24, 30};
  dafsp::Time cm_max = 25;
  dafsp::Time ca_max = 30;
  dafsp::Time anchor_shift = 25;
  std::vector<int> lambda_prime = {0, 3, 2, 1, 4};
  std::vector<int> sigma = {0, 1};
  int buffer_peak = 3;
};
