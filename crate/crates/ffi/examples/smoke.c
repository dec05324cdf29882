#include <stdio.h>
#include <string.h>

#include "mu_wire.h"

int main(void) {
    MwSchema *schema = mw_schema_tree();
    MwRegion *region = NULL;
    const char *literal = "(node (node (node leaf 1 leaf) 5 leaf) 10 (node leaf 20 leaf))";
    if (mw_region_encode(schema, literal, &region) != MW_STATUS_OK) {
        fprintf(stderr, "encode: %s\n", mw_last_error_message());
        return 1;
    }

    const uint8_t *data = NULL;
    size_t len = 0;
    MwCursor root;
    uint64_t sum = 0;
    int32_t right = 0;
    mw_region_bytes(region, &data, &len);
    mw_region_root(region, &root);
    mw_cursor_sum(region, root, &sum);
    mw_cursor_rightmost(region, root, &right);

    char *text = NULL;
    mw_cursor_dump(region, root, &text);
    int same = strcmp(text, literal) == 0;
    mw_string_free(text);

    MwRegion *bad = NULL;
    MwStatus status = mw_region_attach(schema, data, 3, &bad);

    printf("len=%zu sum=%llu rightmost=%d same=%d truncated=%d\n", len, (unsigned long long)sum, right, same,
           status == MW_STATUS_TRUNCATED_BUFFER);
    mw_region_free(region);
    mw_schema_free(schema);
    return 0;
}
