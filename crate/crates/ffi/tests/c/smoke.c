#include <math.h>
#include <stdio.h>
#include "rankone.h"

int main(void) {
    double pos[2] = {0.0, 1.0}, w[2] = {0.5, 0.5};
    RankoneMeasure *m = NULL;
    if (rankone_measure_atomic(RANKONE_SUPPORT_LINE, pos, w, 2, &m) != RANKONE_STATUS_OK) {
        fprintf(stderr, "%s\n", rankone_last_error());
        return 1;
    }
    double eig[2], wt[2];
    size_t len = 0;
    if (rankone_clark_spectrum(m, 1.0, 0.0, eig, wt, 2, &len) != RANKONE_STATUS_OK || len != 2) return 2;
    if (fabs(eig[0] - (1.0 - sqrt(0.5))) > 1e-14) return 3;
    rankone_measure_free(m);

    RankoneReport *r = NULL;
    const char *cfg = "{\"schema_version\": 1, \"subcommand\": \"schur-test\", \"pairs\": 4}";
    if (rankone_run_config(cfg, &r) != RANKONE_STATUS_OK) {
        fprintf(stderr, "%s\n", rankone_last_error());
        return 4;
    }
    if (!rankone_report_passed(r) || rankone_report_csv(r) != NULL) return 5;
    rankone_report_free(r);
    puts("ok");
    return 0;
}
