#include <stdio.h>
#include <string.h>

#include "defifix.h"

int main(void) {
    DefifixField *f7 = NULL;
    if (defifix_field_new("F7", &f7) != DEFIFIX_STATUS_OK) {
        fprintf(stderr, "field: %s\n", defifix_last_error());
        return 1;
    }

    DefifixNeighbourhood *a = NULL;
    if (defifix_neighbourhood_new(f7, "1,2", "2", &a) != DEFIFIX_STATUS_OK) {
        fprintf(stderr, "set: %s\n", defifix_last_error());
        return 1;
    }
    char *witness = NULL;
    if (defifix_is_neighbourhood(a, &witness) != DEFIFIX_STATUS_OK) {
        fprintf(stderr, "expected a neighbourhood\n");
        return 1;
    }

    DefifixFormula *phi = NULL;
    char *text = NULL;
    defifix_neighbourhood_to_formula(a, &phi);
    defifix_formula_to_string(phi, &text);
    printf("%s\n", text);

    char *set = NULL;
    defifix_definable_set(f7, phi, "x", &set);
    printf("%s\n", set);
    int ok = strcmp(set, "[\"[2]\"]") == 0;

    DefifixField *bad = NULL;
    if (defifix_field_new("F4", &bad) != DEFIFIX_STATUS_FIELD) ok = 0;

    defifix_string_free(set);
    defifix_string_free(text);
    defifix_formula_free(phi);
    defifix_neighbourhood_free(a);
    defifix_field_free(f7);
    return ok ? 0 : 1;
}
