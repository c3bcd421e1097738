/*
 * Copyright 2026 The aerint Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/* Exercises the public C interface from plain C. */

#include <stdio.h>
#include <stdlib.h>
#include <string.h>

#include "aerint/aerint.h"

static int failures = 0;

#define EXPECT(cond)                                                             \
    do {                                                                         \
        if (!(cond)) {                                                           \
            fprintf(stderr, "%s:%d: expected %s (%s)\n", __FILE__, __LINE__,     \
                    #cond, aer_last_error());                                    \
            ++failures;                                                          \
        }                                                                        \
    } while (0)

static void analytic(void)
{
    int64_t num = 0, den = 0;
    EXPECT(aer_analytic("token-ring", "sparse", 64, &num, &den) == AER_OK);
    EXPECT(num == 65 && den == 2);
    EXPECT(aer_analytic("hier-tree", "burst", 256, &num, &den) == AER_OK);
    EXPECT(num == 275 && den == 1);
    EXPECT(aer_analytic("hier-ring", "area", 64, &num, &den) == AER_OK);
    EXPECT(num == 80);
    EXPECT(aer_analytic("hier-tree", "sparse", 32, &num, &den) == AER_ERR_INVALID);
    EXPECT(strlen(aer_last_error()) > 0);
    EXPECT(aer_analytic("mesh", "sparse", 64, &num, &den) == AER_ERR_INVALID);
    EXPECT(aer_analytic("binary-tree", "power", 64, &num, &den) == AER_ERR_INVALID);
    EXPECT(aer_analytic("binary-tree", "sparse", 64, NULL, &den) == AER_ERR_INVALID);
}

static void arbiter(void)
{
    aer_arbiter* arb = NULL;
    uint64_t cells = 0, total = 0;
    double mean = 0, ci = 0;
    uint32_t neurons[4] = {3, 17, 40, 63};
    uint32_t addresses[4] = {0};
    int i;

    EXPECT(aer_arbiter_create("hier-tree", 48, 1, &arb) == AER_ERR_INVALID);
    EXPECT(arb == NULL);
    EXPECT(aer_arbiter_create("hier-tree", 64, 1, &arb) == AER_OK);
    EXPECT(aer_arbiter_cell_count(arb, &cells) == AER_OK);
    EXPECT(cells == 9);
    EXPECT(aer_arbiter_measure_sparse(arb, 1000, 2, &mean, &ci) == AER_OK);
    EXPECT(mean == 6.0);
    EXPECT(aer_arbiter_run_burst(arb, neurons, 4, addresses) == AER_OK);
    for (i = 0; i < 4; ++i) {
        int found = 0, k;
        for (k = 0; k < 4; ++k) found |= addresses[k] == neurons[i];
        EXPECT(found);
    }
    neurons[0] = 64;
    EXPECT(aer_arbiter_run_burst(arb, neurons, 4, addresses) == AER_ERR_INVALID);
    aer_arbiter_destroy(arb);

    EXPECT(aer_arbiter_create("token-ring", 16, 1, &arb) == AER_OK);
    EXPECT(aer_arbiter_measure_burst(arb, &total) == AER_OK);
    EXPECT(total == 16);
    aer_arbiter_destroy(arb);
    aer_arbiter_destroy(NULL);
}

static void cam(void)
{
    aer_cam* c = NULL;
    uint8_t flags[16];
    uint64_t cycle = 0;
    double energy = 0;
    int64_t num = 0, den = 0;
    uint32_t i;

    EXPECT(aer_cam_create("{\"entries\":16,\"bogus\":1}", &c) == AER_ERR_INVALID);
    EXPECT(aer_cam_create("{\"completion\":\"sync\"}", &c) == AER_ERR_INVALID);
    EXPECT(aer_cam_create("{\"entries\":16,\"width\":11,\"feedback\":true,\"speculative\":3}", &c) == AER_OK);
    for (i = 0; i < 16; ++i) EXPECT(aer_cam_write(c, i, i % 4) == AER_OK);
    EXPECT(aer_cam_write(c, 16, 0) == AER_ERR_INVALID);
    EXPECT(aer_cam_search(c, 2, flags, 16, &cycle, &energy) == AER_OK);
    for (i = 0; i < 16; ++i) EXPECT(flags[i] == (i % 4 == 2));
    EXPECT(cycle > 0);
    EXPECT(energy > 0);
    EXPECT(aer_cam_search(c, 2, flags, 8, &cycle, &energy) == AER_ERR_INVALID);
    aer_cam_destroy(c);

    EXPECT(aer_speculative_probability(10, 3, &num, &den) == AER_OK);
    EXPECT(num == 897 && den == 1024);
}

static void execute(void)
{
    char* out = NULL;
    char* trace = NULL;
    char* report = NULL;

    EXPECT(aer_execute("arb run", NULL, "{\"arch\":\"hier-tree\",\"n\":64,\"mode\":\"burst\"}", &out, &trace) ==
           AER_OK);
    EXPECT(out != NULL && strstr(out, "# config_hash: ") != NULL);
    EXPECT(trace != NULL && strncmp(trace, "time,component,signal,old,new", 29) == 0);
    EXPECT(aer_check_trace(trace, &report) == AER_OK);
    EXPECT(report != NULL && strncmp(report, "[]", 2) == 0);
    aer_free(out);
    aer_free(trace);
    aer_free(report);

    out = NULL;
    EXPECT(aer_execute("arb run", "{\"arch\":\"hier-tree\"}", "{\"colour\":1}", &out, NULL) == AER_ERR_INVALID);
    EXPECT(out == NULL);
    EXPECT(aer_execute("teleport", NULL, NULL, &out, NULL) == AER_ERR_INVALID);
    EXPECT(aer_check_trace("time,component,signal,old,new\n1,x,req,1,0\n", &report) == AER_ERR_VIOLATION);
    aer_free(report);
    EXPECT(aer_check_trace("garbage", &report) == AER_ERR_INVALID);
}

int main(void)
{
    EXPECT(aer_version() != NULL && strlen(aer_version()) > 0);
    analytic();
    arbiter();
    cam();
    execute();
    if (failures) {
        fprintf(stderr, "%d c_api check(s) failed\n", failures);
        return EXIT_FAILURE;
    }
    printf("c_api: all checks passed\n");
    return EXIT_SUCCESS;
}
