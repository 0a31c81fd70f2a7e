#include <assert.h>
#include <stdio.h>
#include <string.h>
#include "lmhs.h"

int main(void) {
    printf("lmhs version %s\n", lmhs_version());
    char *json = NULL;
    assert(lmhs_fixture("a", &json) == LMHS_STATUS_OK);
    LmhsProblem *problem = NULL;
    assert(lmhs_problem_parse(json, &problem) == LMHS_STATUS_OK);
    char *report = NULL;
    LmhsStatus status = lmhs_run(problem, "verify-lmhs", &report);
    assert(status == LMHS_STATUS_OK);
    assert(strstr(report, "\"ok\": true") != NULL);
    printf("verify-lmhs on fixture a: ok\n");
    lmhs_string_free(report);
    lmhs_problem_free(problem);
    lmhs_string_free(json);

    LmhsProblem *bad = NULL;
    assert(lmhs_problem_parse("not json", &bad) == LMHS_STATUS_INVALID_INPUT);
    assert(lmhs_last_error() != NULL);
    printf("error path: %s\n", lmhs_last_error());
    return 0;
}
