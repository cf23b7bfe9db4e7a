#include <math.h>
#include <stdio.h>
#include <string.h>

#include "capflow.h"

#define CHECK(cond)                                                   \
    do {                                                              \
        if (!(cond)) {                                                \
            fprintf(stderr, "%s:%d: %s\n", __FILE__, __LINE__, #cond); \
            return 1;                                                 \
        }                                                             \
    } while (0)

int main(void) {
    const char *cfg =
        "{\"kind\":\"mcf\",\"grid\":{\"n\":2,\"n_beta\":40,\"theta\":1.2},"
        "\"t_max\":0.005,\"initial\":{\"kind\":\"cap\",\"radius\":1.0}}";
    CapflowRun *run = NULL;
    CHECK(capflow_run_flow(cfg, &run) == CAPFLOW_STATUS_OK);
    size_t rows = capflow_run_row_count(run);
    CHECK(rows >= 2);

    double t, w[4];
    CHECK(capflow_run_row(run, rows - 1, &t, w, 4) == CAPFLOW_STATUS_OK);
    CHECK(fabs(t - 0.005) < 1e-12);

    char *csv = NULL;
    CHECK(capflow_run_trace_csv(run, &csv) == CAPFLOW_STATUS_OK);
    CHECK(strncmp(csv, "t,W0,", 5) == 0);
    capflow_string_free(csv);
    capflow_run_free(run);

    CHECK(capflow_run_flow("{", &run) == CAPFLOW_STATUS_CONFIG);
    CHECK(capflow_last_error() != NULL);

    double flat[4];
    CHECK(capflow_cap_quermass(2, 1.2, INFINITY, 50, flat, 4) == CAPFLOW_STATUS_OK);
    CHECK(flat[0] > 0.0);

    printf("ok %s\n", capflow_version());
    return 0;
}
