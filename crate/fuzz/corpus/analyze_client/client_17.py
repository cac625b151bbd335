from shop.pricing import convert
import shop.pricing
from shop.cart import Cart, checkout, refund, merge_carts

shop.pricing.price(25, rounding=2)
shop.pricing.price(25, rounding=0)
shop.pricing.round_total(9)
a = Cart('x', strict=True)
b = Cart('y', strict=True)
merge_carts(a, b)
amount = 3
src = 'EUR'
dst = 'USD'
fee = 0.5
convert(amount, src, dst, fee=fee)
