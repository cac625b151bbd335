import shop.pricing
from shop.cart import Cart, checkout, refund, merge_carts

shop.pricing.round_total(9)
shop.pricing.format_price(3, symbol='$', spaces=False)
refund(4, 'damaged')
