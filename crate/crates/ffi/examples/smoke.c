#include <stdio.h>
#include "callmatch.h"
int main(void) {
  CmInstance *b = cm_instance_new();
  cm_instance_add_bid(b, 100, 1); cm_instance_add_bid(b, 80, 2);
  cm_instance_add_ask(b, 90, 1); cm_instance_add_ask(b, 70, 2);
  CmMatching *m = NULL; uint64_t p = 0;
  if (cm_run(b, CM_ALGORITHM_UM, &m) != CM_STATUS_OK) return 1;
  cm_uniform_price(b, &p);
  CmFill f; cm_matching_get(m, 0, &f);
  printf("%zu %llu %llu-%llu\n", cm_matching_len(m), (unsigned long long)p, (unsigned long long)f.bid_id, (unsigned long long)f.ask_id);
  if (cm_instance_add_bid(b, 1, 1) != CM_STATUS_DUPLICATE_ID) return 2;
  printf("%s\n", cm_last_error_message());
  cm_matching_free(m); cm_instance_free(b);
  return 0;
}
